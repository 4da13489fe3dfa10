#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace fracvar {

/// Raised whenever an operation is called outside its mathematical domain
/// (bad grid, non-finite samples, mismatched operands, invalid orders ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Uniform partition of [a, b] into n subintervals.
///
/// node(0) == a and node(n) == b hold exactly; interior nodes are a + i*h.
/// Uniformity makes the reflection t -> b - t + a an exact permutation of
/// the nodes (node i <-> node n - i), which the dual operator relies on.
template <typename Scalar>
class BasicGrid {
 public:
  BasicGrid(Scalar a, Scalar b, Index n) : a_(a), b_(b), n_(n) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
      std::ostringstream msg;
      msg << "grid: need finite a < b, got a=" << a << " b=" << b;
      throw DomainError(msg.str());
    }
    if (n < 2) {
      throw DomainError("grid: need n >= 2 subintervals, got n=" + std::to_string(n));
    }
    h_ = (b - a) / static_cast<Scalar>(n);
  }

  Scalar a() const { return a_; }
  Scalar b() const { return b_; }
  Scalar h() const { return h_; }
  Scalar length() const { return b_ - a_; }
  Index n() const { return n_; }
  Index size() const { return n_ + 1; }

  Scalar node(Index i) const {
    if (i == n_) return b_;
    return a_ + static_cast<Scalar>(i) * h_;
  }

  Vector<Scalar> nodes() const {
    Vector<Scalar> t(size());
    for (Index i = 0; i <= n_; ++i) t[i] = node(i);
    return t;
  }

  bool operator==(const BasicGrid& other) const {
    return a_ == other.a_ && b_ == other.b_ && n_ == other.n_;
  }
  bool operator!=(const BasicGrid& other) const { return !(*this == other); }

 private:
  Scalar a_;
  Scalar b_;
  Index n_;
  Scalar h_;
};

template <typename Scalar>
BasicGrid<Scalar> make_grid(Scalar a, Scalar b, Index n) {
  return BasicGrid<Scalar>(a, b, n);
}

/// Values of a real function sampled at every node of a grid.
template <typename Scalar>
class BasicGridFunction {
 public:
  using GridType = BasicGrid<Scalar>;
  using VectorType = Vector<Scalar>;

  BasicGridFunction(const GridType& grid, VectorType values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw DomainError("grid function: expected " + std::to_string(grid_.size()) +
                        " values, got " + std::to_string(values_.size()));
    }
    if (!values_.allFinite()) {
      throw DomainError("grid function: non-finite value");
    }
  }

  static BasicGridFunction zeros(const GridType& grid) {
    return BasicGridFunction(grid, VectorType::Zero(grid.size()));
  }
  static BasicGridFunction constant(const GridType& grid, Scalar c) {
    return BasicGridFunction(grid, VectorType::Constant(grid.size(), c));
  }

  const GridType& grid() const { return grid_; }
  const VectorType& values() const { return values_; }
  Index size() const { return values_.size(); }
  Scalar operator[](Index i) const { return values_[i]; }
  Scalar front() const { return values_[0]; }
  Scalar back() const { return values_[values_.size() - 1]; }

  BasicGridFunction operator-() const { return {grid_, -values_}; }

  friend BasicGridFunction operator+(const BasicGridFunction& u, const BasicGridFunction& v) {
    require_same_grid(u, v, "+");
    return {u.grid_, u.values_ + v.values_};
  }
  friend BasicGridFunction operator-(const BasicGridFunction& u, const BasicGridFunction& v) {
    require_same_grid(u, v, "-");
    return {u.grid_, u.values_ - v.values_};
  }
  // pointwise product
  friend BasicGridFunction operator*(const BasicGridFunction& u, const BasicGridFunction& v) {
    require_same_grid(u, v, "*");
    return {u.grid_, u.values_.cwiseProduct(v.values_)};
  }
  friend BasicGridFunction operator*(Scalar c, const BasicGridFunction& u) {
    return {u.grid_, c * u.values_};
  }
  friend BasicGridFunction operator*(const BasicGridFunction& u, Scalar c) { return c * u; }

  friend void require_same_grid(const BasicGridFunction& u, const BasicGridFunction& v,
                                const char* what) {
    if (u.grid_ != v.grid_) {
      throw DomainError(std::string("grid mismatch in ") + what);
    }
  }

 private:
  GridType grid_;
  VectorType values_;
};

using Grid = BasicGrid<double>;
using GridFunction = BasicGridFunction<double>;

/// Order of a fractional operator, 0 <= alpha <= 1.
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      std::ostringstream msg;
      msg << "fractional order must lie in [0, 1], got " << alpha;
      throw DomainError(msg.str());
    }
  }
  double value() const { return alpha_; }
  FractionalOrder complement() const { return FractionalOrder(1.0 - alpha_); }
  bool operator==(const FractionalOrder&) const = default;

 private:
  double alpha_;
};

template <typename Scalar, typename Fn>
  requires std::invocable<Fn&, Scalar>
BasicGridFunction<Scalar> sample(Fn&& fn, const BasicGrid<Scalar>& grid) {
  Vector<Scalar> v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Scalar t = grid.node(i);
    v[i] = static_cast<Scalar>(fn(t));
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << "sample: non-finite value at node " << i << " (t=" << t << ")";
      throw DomainError(msg.str());
    }
  }
  return {grid, std::move(v)};
}

/// Second-order finite-difference derivative: central at interior nodes,
/// one-sided three-point stencils at a and b. Exact on quadratics.
template <typename Scalar>
BasicGridFunction<Scalar> fd_derivative(const BasicGridFunction<Scalar>& u) {
  const auto& g = u.grid();
  const Index n = g.n();
  const auto& x = u.values();
  const Scalar two_h = Scalar(2) * g.h();
  Vector<Scalar> d(g.size());
  d[0] = (Scalar(-3) * x[0] + Scalar(4) * x[1] - x[2]) / two_h;
  for (Index i = 1; i < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / two_h;
  d[n] = (Scalar(3) * x[n] - Scalar(4) * x[n - 1] + x[n - 2]) / two_h;
  return {g, std::move(d)};
}

/// Composite trapezoid rule over the whole grid.
template <typename Scalar>
Scalar trapezoid_integral(const BasicGridFunction<Scalar>& u) {
  const auto& x = u.values();
  const Index n = u.grid().n();
  Scalar inner = x.segment(1, n - 1).sum();
  return u.grid().h() * (inner + (x[0] + x[n]) / Scalar(2));
}

enum class NormKind { sup, l2, interior_sup };

/// sup / trapezoid-weighted L2 / sup restricted to nodes in [a + delta, b - delta].
template <typename Scalar>
Scalar norm(const BasicGridFunction<Scalar>& u, NormKind kind, Scalar delta = Scalar(0)) {
  const auto& g = u.grid();
  switch (kind) {
    case NormKind::sup:
      return u.values().cwiseAbs().maxCoeff();
    case NormKind::l2:
      return std::sqrt(trapezoid_integral(BasicGridFunction<Scalar>(g, u.values().cwiseAbs2())));
    case NormKind::interior_sup: {
      if (!(delta >= Scalar(0) && delta < g.length() / Scalar(2))) {
        throw DomainError("interior_sup: delta must lie in [0, (b-a)/2)");
      }
      // node-location slack so that nodes sitting on a +- delta are included
      const Scalar slack = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * g.length();
      const Scalar lo = g.a() + delta - slack;
      const Scalar hi = g.b() - delta + slack;
      Scalar m(0);
      for (Index i = 0; i < g.size(); ++i) {
        const Scalar t = g.node(i);
        if (t >= lo && t <= hi) m = std::max(m, std::abs(u[i]));
      }
      return m;
    }
  }
  throw DomainError("norm: unknown kind");
}

template <typename Scalar>
Scalar sup_norm(const BasicGridFunction<Scalar>& u) {
  return norm(u, NormKind::sup);
}

template <typename Scalar>
Scalar interior_sup_norm(const BasicGridFunction<Scalar>& u, Scalar delta) {
  return norm(u, NormKind::interior_sup, delta);
}

/// Gamma function for positive arguments.
template <typename Scalar>
Scalar gamma(Scalar x) {
  if (!(x > Scalar(0)) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "gamma: argument must be positive and finite, got " << x;
    throw DomainError(msg.str());
  }
  return std::tgamma(x);
}

}  // namespace fracvar
