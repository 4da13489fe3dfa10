#include "fracvar/variational.hpp"

#include "fracvar/duality.hpp"
#include "fracvar/frac_ops.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace fracvar {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

// L-type evaluator sampled along a trajectory; non-finite values are reported
// with the calling operation and the node.
VectorXd sample_along(const LagrangianFn& fn, const char* what, const Grid& g, const VectorXd& x,
                      const VectorXd& xd, const VectorXd& u, const VectorXd& v) {
  if (!fn) throw DomainError(std::string(what) + ": evaluator not set");
  VectorXd out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    out[i] = fn(g.node(i), x[i], xd[i], u[i], v[i]);
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg << what << ": non-finite value at t=" << g.node(i);
      throw DomainError(msg.str());
    }
  }
  return out;
}

// Trapezoid weights, so that trapezoid_integral(f) == weights.dot(f).
VectorXd trapezoid_weights(const Grid& g) {
  VectorXd w = VectorXd::Constant(g.size(), g.h());
  w[0] = g.h() / 2;
  w[g.n()] = g.h() / 2;
  return w;
}

double sign_of(SignConvention c) { return c == SignConvention::printed ? -1.0 : 1.0; }

struct Partials {
  VectorXd d2, d3, d4, d5;
};

Partials partials_along(const LagrangianSpec& spec, const Grid& g, const VectorXd& x,
                        const VectorXd& xd, const VectorXd& u, const VectorXd& v) {
  return {sample_along(spec.d2, "d2", g, x, xd, u, v), sample_along(spec.d3, "d3", g, x, xd, u, v),
          sample_along(spec.d4, "d4", g, x, xd, u, v), sample_along(spec.d5, "d5", g, x, xd, u, v)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs

LagrangianSpec classical_oscillator(double k) {
  LagrangianSpec s;
  s.L = [k](double, double x, double xd, double, double) { return 0.5 * xd * xd - 0.5 * k * x * x; };
  s.d2 = [k](double, double x, double, double, double) { return -k * x; };
  s.d3 = [](double, double, double xd, double, double) { return xd; };
  s.d4 = [](double, double, double, double, double) { return 0.0; };
  s.d5 = [](double, double, double, double, double) { return 0.0; };
  return s;
}

PartialsCheck check_partials(const LagrangianSpec& spec, double a, double b, std::uint64_t seed,
                             int samples) {
  const std::array<const LagrangianFn*, 4> d{&spec.d2, &spec.d3, &spec.d4, &spec.d5};
  std::mt19937_64 rng(seed);
  PartialsCheck out;
  for (int s = 0; s < samples; ++s) {
    std::array<double, 5> p{uniform(rng, a, b), uniform(rng, -2, 2), uniform(rng, -2, 2),
                            uniform(rng, -2, 2), uniform(rng, -2, 2)};
    for (int i = 1; i < 5; ++i) {
      const double step = 1e-5 * std::max(1.0, std::abs(p[i]));
      auto plus = p, minus = p;
      plus[i] += step;
      minus[i] -= step;
      const auto call = [&](const LagrangianFn& f, const std::array<double, 5>& q) {
        return f(q[0], q[1], q[2], q[3], q[4]);
      };
      const double fd = (call(spec.L, plus) - call(spec.L, minus)) / (plus[i] - minus[i]);
      const double err = std::abs(call(*d[i - 1], p) - fd) / std::max(1.0, std::abs(fd));
      if (!(err <= out.max_rel_error)) {
        out.max_rel_error = err;
        out.worst_partial = i + 1;
      }
    }
  }
  return out;
}

DissipativeParams DissipativeParams::harmonic(double mass, double friction, double k) {
  DissipativeParams p;
  p.mass = mass;
  p.friction = friction;
  p.U = [k](double x) { return 0.5 * k * x * x; };
  p.Uprime = [k](double x) { return k * x; };
  p.stiffness = k;
  return p;
}

double check_potential(const DissipativeParams& p, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = uniform(rng, -2, 2);
    const double step = 1e-5 * std::max(1.0, std::abs(x));
    const double fd = (p.U(x + step) - p.U(x - step)) / (2 * step);
    worst = std::max(worst, std::abs(p.Uprime(x) - fd) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

LagrangianSpec dissipative_lagrangian(const DissipativeParams& p, FractionalOrder alpha1) {
  if (!(alpha1.value() > 0.0 && alpha1.value() < 1.0)) {
    throw DomainError("dissipative_lagrangian: alpha1 must lie in (0, 1)");
  }
  if (!p.U || !p.Uprime) throw DomainError("dissipative_lagrangian: potential not set");
  const double m = p.mass;
  const double c = p.friction;
  const auto U = p.U;
  const auto dU = p.Uprime;
  LagrangianSpec s;
  s.L = [=](double, double x, double xd, double u, double v) {
    return 0.5 * m * xd * xd - U(x) + 0.5 * c * u * v;
  };
  s.d2 = [=](double, double x, double, double, double) { return -dU(x); };
  s.d3 = [=](double, double, double xd, double, double) { return m * xd; };
  s.d4 = [=](double, double, double, double, double v) { return 0.5 * c * v; };
  s.d5 = [=](double, double, double, double u, double) { return 0.5 * c * u; };
  s.alpha1 = alpha1;
  s.alpha2 = alpha1.complement();
  return s;
}

// ---------------------------------------------------------------------------
// Action, variation, residual

std::pair<GridFunction, GridFunction> fractional_arguments(const GridFunction& x,
                                                           FractionalOrder alpha1,
                                                           FractionalOrder alpha2) {
  return {left_rl_derivative(x, alpha1), dual(left_rl_derivative(x, alpha2))};
}

double action_value(const LagrangianSpec& spec, const GridFunction& x) {
  const auto& g = x.grid();
  const auto xd = fd_derivative(x);
  const auto [u, v] = fractional_arguments(x, spec.alpha1, spec.alpha2);
  const VectorXd dens =
      sample_along(spec.L, "action_value", g, x.values(), xd.values(), u.values(), v.values());
  return trapezoid_weights(g).dot(dens);
}

double first_variation(const LagrangianSpec& spec, const GridFunction& x, const GridFunction& h) {
  require_same_grid(x, h, "first_variation");
  const double tol = 1e-12 * std::max(1.0, sup_norm(h));
  if (!(std::abs(h.front()) <= tol && std::abs(h.back()) <= tol)) {
    throw DomainError("first_variation: variation must vanish at both endpoints");
  }
  const auto& g = x.grid();
  const auto xd = fd_derivative(x);
  const auto [u, v] = fractional_arguments(x, spec.alpha1, spec.alpha2);
  const auto P = partials_along(spec, g, x.values(), xd.values(), u.values(), v.values());
  const auto hd = fd_derivative(h);
  const auto [hu, hv] = fractional_arguments(h, spec.alpha1, spec.alpha2);
  const VectorXd dens = P.d2.cwiseProduct(h.values()) + P.d3.cwiseProduct(hd.values()) +
                        P.d4.cwiseProduct(hu.values()) + P.d5.cwiseProduct(hv.values());
  return trapezoid_weights(g).dot(dens);
}

ElTerms el_terms(const LagrangianSpec& spec, const GridFunction& x, SignConvention convention) {
  const auto& g = x.grid();
  const auto xd = fd_derivative(x);
  const auto [u, v] = fractional_arguments(x, spec.alpha1, spec.alpha2);
  const auto P = partials_along(spec, g, x.values(), xd.values(), u.values(), v.values());
  const double s = sign_of(convention);
  const GridFunction d3(g, P.d3), d4(g, P.d4), d5(g, P.d5);
  return {GridFunction(g, P.d2), -fd_derivative(d3),
          s * dual(left_rl_derivative(dual(d4), spec.alpha1)),
          s * dual(left_rl_derivative(d5, spec.alpha2))};
}

GridFunction el_residual(const LagrangianSpec& spec, const GridFunction& x,
                         SignConvention convention) {
  const auto t = el_terms(spec, x, convention);
  return t.potential + t.inertial + t.frac_left + t.frac_dual;
}

double consistency_variation_vs_residual(const LagrangianSpec& spec, const GridFunction& x,
                                         const GridFunction& h, SignConvention convention) {
  const double fv = first_variation(spec, x, h);
  return std::abs(fv - pairing(el_residual(spec, x, convention), h));
}

GridFunction eom_residual(const GridFunction& x, const DissipativeParams& p,
                          SignConvention convention) {
  if (!p.Uprime) throw DomainError("eom_residual: potential derivative not set");
  const auto xd = fd_derivative(x);
  const auto xdd = fd_derivative(xd);
  const double s = -sign_of(convention);
  VectorXd r(x.size());
  for (Index i = 0; i < x.size(); ++i) r[i] = p.Uprime(x[i]);
  return GridFunction(x.grid(), std::move(r)) + (s * p.friction) * dual(xd) + p.mass * xdd;
}

// ---------------------------------------------------------------------------
// Solvers

GridFunction boundary_line(const BoundaryConditions& bc, const Grid& grid) {
  if (!std::isfinite(bc.xa) || !std::isfinite(bc.xb)) {
    throw DomainError("boundary conditions must be finite");
  }
  VectorXd x(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double s = (grid.node(i) - grid.a()) / grid.length();
    x[i] = bc.xa + (bc.xb - bc.xa) * s;
  }
  x[0] = bc.xa;
  x[grid.n()] = bc.xb;
  return {grid, std::move(x)};
}

void validate(const RitzConfig& cfg) {
  if (cfg.basis_size < 1) throw DomainError("ritz: basis_size must be a positive integer");
  if (cfg.max_iters < 1) throw DomainError("ritz: max_iters must be a positive integer");
  if (!(cfg.grad_tol > 0.0) || !std::isfinite(cfg.grad_tol)) {
    throw DomainError("ritz: grad_tol must be positive");
  }
  if (!(cfg.step_shrink > 0.0 && cfg.step_shrink < 1.0)) {
    throw DomainError("ritz: step_shrink must lie in (0, 1)");
  }
}

std::string_view to_string(RitzStatus s) {
  switch (s) {
    case RitzStatus::converged: return "converged";
    case RitzStatus::max_iters_reached: return "max_iters reached";
    case RitzStatus::line_search_failed: return "line search failed";
  }
  return "unknown";
}

namespace {

// Every quantity the action needs is linear in the trajectory, so the images
// of the affine part and of each sine mode are computed once and recombined.
class RitzProblem {
 public:
  RitzProblem(const LagrangianSpec& spec, const BoundaryConditions& bc, const Grid& grid,
              Index m)
      : spec_(spec), grid_(grid), weights_(trapezoid_weights(grid)) {
    const Index N = grid.size();
    const GridFunction line = boundary_line(bc, grid);
    base_ = images(line);
    for (auto* M : {&phi_.x, &phi_.xd, &phi_.u, &phi_.v}) M->resize(N, m);
    const double pi = std::numbers::pi;
    for (Index k = 0; k < m; ++k) {
      VectorXd s(N);
      for (Index i = 0; i < N; ++i) {
        s[i] = std::sin(static_cast<double>(k + 1) * pi * (grid.node(i) - grid.a()) / grid.length());
      }
      s[0] = 0.0;
      s[grid.n()] = 0.0;
      const auto im = images(GridFunction(grid, std::move(s)));
      phi_.x.col(k) = im.x;
      phi_.xd.col(k) = im.xd;
      phi_.u.col(k) = im.u;
      phi_.v.col(k) = im.v;
    }
  }

  Index size() const { return phi_.x.cols(); }

  VectorXd trajectory(const VectorXd& c) const { return base_.x + phi_.x * c; }

  double action(const VectorXd& c) const {
    const auto st = state(c);
    const VectorXd dens = sample_along(spec_.L, "ritz_solve: action", grid_, st.x, st.xd, st.u, st.v);
    const double S = weights_.dot(dens);
    if (!std::isfinite(S)) throw DomainError("ritz_solve: non-finite action");
    return S;
  }

  // Component k is the first variation along mode k.
  VectorXd gradient(const VectorXd& c) const {
    const auto st = state(c);
    const auto P = partials_along(spec_, grid_, st.x, st.xd, st.u, st.v);
    return phi_.x.transpose() * weights_.cwiseProduct(P.d2) +
           phi_.xd.transpose() * weights_.cwiseProduct(P.d3) +
           phi_.u.transpose() * weights_.cwiseProduct(P.d4) +
           phi_.v.transpose() * weights_.cwiseProduct(P.d5);
  }

 private:
  struct Fields {
    VectorXd x, xd, u, v;
  };
  struct Modes {
    MatrixXd x, xd, u, v;
  };

  Fields images(const GridFunction& f) const {
    const auto [u, v] = fractional_arguments(f, spec_.alpha1, spec_.alpha2);
    return {f.values(), fd_derivative(f).values(), u.values(), v.values()};
  }

  Fields state(const VectorXd& c) const {
    return {base_.x + phi_.x * c, base_.xd + phi_.xd * c, base_.u + phi_.u * c,
            base_.v + phi_.v * c};
  }

  const LagrangianSpec& spec_;
  Grid grid_;
  VectorXd weights_;
  Fields base_;
  Modes phi_;
};

double sup(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-14;
constexpr double kFlat = 1e-12;

void descend(const RitzProblem& P, const RitzConfig& cfg, VectorXd& c, RitzResult& r) {
  double step = 1.0;  // carried over between iterations, only ever shrinks
  double S = P.action(c);
  for (r.iterations = 0; r.iterations < cfg.max_iters; ++r.iterations) {
    const VectorXd g = P.gradient(c);
    r.gradient_sup = sup(g);
    if (r.gradient_sup <= cfg.grad_tol) {
      r.status = RitzStatus::converged;
      return;
    }
    const double gg = g.squaredNorm();
    for (;;) {
      const VectorXd trial = c - step * g;
      const double St = P.action(trial);
      bool accept = St <= S - kArmijo * step * gg;
      // Approximate Armijo (Hager-Zhang): once decreases sink below the
      // round-off of S, accept a flat step whose slope has not overshot.
      if (!accept && St <= S + kFlat * (1.0 + std::abs(S))) {
        accept = P.gradient(trial).dot(g) >= -(1.0 - 2.0 * kArmijo) * gg;
      }
      if (accept) {
        c = trial;
        S = St;
        break;
      }
      step *= cfg.step_shrink;
      if (step < kMinStep) {
        r.status = RitzStatus::line_search_failed;
        return;
      }
    }
  }
  r.gradient_sup = sup(P.gradient(c));
  r.status = r.gradient_sup <= cfg.grad_tol ? RitzStatus::converged : RitzStatus::max_iters_reached;
}

void newton(const RitzProblem& P, const RitzConfig& cfg, VectorXd& c, RitzResult& r) {
  const Index m = P.size();
  VectorXd g = P.gradient(c);
  for (r.iterations = 0; r.iterations < cfg.max_iters; ++r.iterations) {
    r.gradient_sup = sup(g);
    if (r.gradient_sup <= cfg.grad_tol) {
      r.status = RitzStatus::converged;
      return;
    }
    MatrixXd H(m, m);
    for (Index j = 0; j < m; ++j) {
      const double eps = 1e-4 * std::max(1.0, std::abs(c[j]));
      VectorXd cp = c, cm = c;
      cp[j] += eps;
      cm[j] -= eps;
      H.col(j) = (P.gradient(cp) - P.gradient(cm)) / (cp[j] - cm[j]);
    }
    H = (0.5 * (H + H.transpose())).eval();
    const VectorXd d = H.colPivHouseholderQr().solve(-g);
    if (!d.allFinite()) {
      r.status = RitzStatus::line_search_failed;
      return;
    }
    const double merit = g.squaredNorm();
    double step = 1.0;
    for (;;) {
      const VectorXd trial = c + step * d;
      const VectorXd gt = P.gradient(trial);
      if (gt.squaredNorm() <= (1.0 - kArmijo * step) * merit) {
        c = trial;
        g = gt;
        break;
      }
      step *= cfg.step_shrink;
      if (step < kMinStep) {
        r.status = RitzStatus::line_search_failed;
        return;
      }
    }
  }
  r.gradient_sup = sup(g);
  r.status = r.gradient_sup <= cfg.grad_tol ? RitzStatus::converged : RitzStatus::max_iters_reached;
}

}  // namespace

RitzResult ritz_solve(const LagrangianSpec& spec, const BoundaryConditions& bc, const Grid& grid,
                      const RitzConfig& cfg) {
  validate(cfg);
  const RitzProblem P(spec, bc, grid, cfg.basis_size);
  VectorXd c = VectorXd::Zero(cfg.basis_size);
  RitzResult r{boundary_line(bc, grid), c};
  if (cfg.method == RitzMethod::newton) {
    newton(P, cfg, c, r);
  } else {
    descend(P, cfg, c, r);
  }
  r.coefficients = c;
  r.x = GridFunction(grid, P.trajectory(c));
  r.action = P.action(c);
  return r;
}

GridFunction solve_linear_eom(const DissipativeParams& p, const BoundaryConditions& bc,
                              const Grid& grid, SignConvention convention) {
  if (!(p.mass > 0.0)) throw DomainError("solve_linear_eom: mass must be positive");
  if (!p.stiffness) throw DomainError("solve_linear_eom: needs a quadratic potential (stiffness k)");
  if (!std::isfinite(bc.xa) || !std::isfinite(bc.xb)) {
    throw DomainError("solve_linear_eom: boundary conditions must be finite");
  }
  const Index n = grid.n();
  const Index N = grid.size();
  const double h = grid.h();
  const double k = *p.stiffness;
  // interior rows scaled by h^2 / m so every row has O(1) entries
  const double cs = -sign_of(convention) * p.friction * h / (2 * p.mass);
  const double kh = k * h * h / p.mass;

  MatrixXd A = MatrixXd::Zero(N, N);
  VectorXd rhs = VectorXd::Zero(N);
  A(0, 0) = 1.0;
  rhs[0] = bc.xa;
  A(n, n) = 1.0;
  rhs[n] = bc.xb;
  for (Index i = 1; i < n; ++i) {
    A(i, i - 1) += 1.0;
    A(i, i) += kh - 2.0;
    A(i, i + 1) += 1.0;
    // reflected velocity: central difference at node n - i
    const Index j = n - i;
    A(i, j + 1) += cs;
    A(i, j - 1) -= cs;
  }
  const Eigen::PartialPivLU<MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-13)) {
    std::ostringstream msg;
    msg << "solve_linear_eom: singular system (reciprocal condition estimate " << rc << ")";
    throw DomainError(msg.str());
  }
  VectorXd x = lu.solve(rhs);
  x[0] = bc.xa;
  x[n] = bc.xb;
  return {grid, std::move(x)};
}

}  // namespace fracvar
