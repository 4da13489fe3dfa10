#pragma once

// Left/right Riemann-Liouville fractional integrals and derivatives on
// uniform grids.
//
// Integrals use product integration: the integrand is replaced by its
// piecewise-linear interpolant and every kernel moment is integrated in
// closed form. The weights are Toeplitz in the node offset, so they are
// built once per call in O(n) and applied in O(n^2).
//
// The left and right operators are deliberately assembled by different
// routes (closed-form second differences vs. per-cell Gauss-Legendre
// moments). Neither is obtained by reflecting the other, so the duality
// identities checked elsewhere compare two independent computations.

#include "fracvar/grid.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace fracvar {

namespace detail {

template <typename Scalar, int N>
struct GaussLegendreRule {
  std::array<Scalar, N> x;  // nodes on [0, 1]
  std::array<Scalar, N> w;
};

template <typename Scalar, int N>
GaussLegendreRule<Scalar, N> make_gauss_legendre() {
  GaussLegendreRule<Scalar, N> rule{};
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar tol = Scalar(4) * std::numeric_limits<Scalar>::epsilon();
  for (int i = 0; i < N; ++i) {
    Scalar z = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(N) + Scalar(0.5)));
    Scalar dp(0);
    for (int it = 0; it < 100; ++it) {
      Scalar p0(1), p1 = z;
      for (int k = 2; k <= N; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * z * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(N) * (z * p1 - p0) / (z * z - Scalar(1));
      const Scalar dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= tol) break;
    }
    rule.x[i] = (Scalar(1) + z) / Scalar(2);
    rule.w[i] = Scalar(1) / ((Scalar(1) - z * z) * dp * dp);
  }
  return rule;
}

template <typename Scalar>
const GaussLegendreRule<Scalar, 16>& gauss_legendre_16() {
  static const auto rule = make_gauss_legendre<Scalar, 16>();
  return rule;
}

// (1 + x)^p - 1 without cancellation for small x.
template <typename Scalar>
Scalar pow1p_minus_one(Scalar x, Scalar p) {
  return std::expm1(p * std::log1p(x));
}

// Weights of the left product-integration rule, scaled by Gamma(alpha + 2) / h^alpha:
//   offset[r] = (r+1)^p - 2 r^p + (r-1)^p   (r >= 1), p = alpha + 1
//   first[k]  = (k-1)^p - (k-1-alpha) k^alpha   (weight of u_0 at node k)
// Both are evaluated as r^p * (small bracket) to avoid cancellation at large r.
template <typename Scalar>
struct LeftWeights {
  Vector<Scalar> offset;
  Vector<Scalar> first;
};

template <typename Scalar>
LeftWeights<Scalar> left_weights(Index n, Scalar alpha) {
  const Scalar p = alpha + Scalar(1);
  LeftWeights<Scalar> w{Vector<Scalar>::Zero(n + 1), Vector<Scalar>::Zero(n + 1)};
  w.offset[0] = Scalar(1);
  for (Index r = 1; r <= n; ++r) {
    const Scalar rr = static_cast<Scalar>(r);
    const Scalar inv = Scalar(1) / rr;
    const Scalar bracket = pow1p_minus_one(inv, p) + pow1p_minus_one(-inv, p);
    w.offset[r] = std::pow(rr, p) * bracket;
    w.first[r] = std::pow(rr, p) * (pow1p_minus_one(-inv, p) + p * inv);
  }
  return w;
}

// Per-cell moments of the right kernel, in units of h:
//   near[m] = int_m^{m+1} s^(alpha-1) (m+1-s) ds   (weight of the cell's left node)
//   far[m]  = int_m^{m+1} s^(alpha-1) (s-m) ds     (weight of the cell's right node)
// The singular cell m = 0 is closed form; the others are smooth and use
// 16-point Gauss-Legendre, which is exact to round-off there.
template <typename Scalar>
struct RightMoments {
  Vector<Scalar> near;
  Vector<Scalar> far;
};

template <typename Scalar>
RightMoments<Scalar> right_moments(Index n, Scalar alpha) {
  RightMoments<Scalar> mom{Vector<Scalar>(n), Vector<Scalar>(n)};
  mom.near[0] = Scalar(1) / (alpha * (alpha + Scalar(1)));
  mom.far[0] = Scalar(1) / (alpha + Scalar(1));
  const auto& gl = gauss_legendre_16<Scalar>();
  for (Index m = 1; m < n; ++m) {
    Scalar near(0), far(0);
    for (int q = 0; q < 16; ++q) {
      const Scalar frac = gl.x[q];
      const Scalar kernel = std::pow(static_cast<Scalar>(m) + frac, alpha - Scalar(1));
      near += gl.w[q] * kernel * (Scalar(1) - frac);
      far += gl.w[q] * kernel * frac;
    }
    mom.near[m] = near;
    mom.far[m] = far;
  }
  return mom;
}

}  // namespace detail

/// Left fractional integral (I^alpha_{a+} u) at every node.
template <typename Scalar>
BasicGridFunction<Scalar> left_frac_integral(const BasicGridFunction<Scalar>& u,
                                             FractionalOrder order) {
  if (order.value() == 0.0) return u;
  const auto& g = u.grid();
  const Index n = g.n();
  const Scalar alpha = static_cast<Scalar>(order.value());
  const auto w = detail::left_weights<Scalar>(n, alpha);
  const Scalar scale = std::pow(g.h(), alpha) / gamma(alpha + Scalar(2));
  const auto& x = u.values();

  Vector<Scalar> out(g.size());
  out[0] = Scalar(0);
  for (Index k = 1; k <= n; ++k) {
    Scalar s = w.first[k] * x[0] + x[k];
    for (Index j = 1; j < k; ++j) s += w.offset[k - j] * x[j];
    out[k] = scale * s;
  }
  return {g, std::move(out)};
}

/// Right fractional integral (I^alpha_{b-} u) at every node, by direct
/// quadrature over [t, b].
template <typename Scalar>
BasicGridFunction<Scalar> right_frac_integral(const BasicGridFunction<Scalar>& u,
                                              FractionalOrder order) {
  if (order.value() == 0.0) return u;
  const auto& g = u.grid();
  const Index n = g.n();
  const Scalar alpha = static_cast<Scalar>(order.value());
  const auto mom = detail::right_moments<Scalar>(n, alpha);
  const Scalar scale = std::pow(g.h(), alpha) / gamma(alpha);
  const auto& x = u.values();

  Vector<Scalar> out(g.size());
  out[n] = Scalar(0);
  for (Index k = 0; k < n; ++k) {
    Scalar s(0);
    for (Index j = k; j < n; ++j) s += mom.near[j - k] * x[j] + mom.far[j - k] * x[j + 1];
    out[k] = scale * s;
  }
  return {g, std::move(out)};
}

/// Left Riemann-Liouville derivative, computed as d/dt I^{1-alpha}_{a+} u.
template <typename Scalar>
BasicGridFunction<Scalar> left_rl_derivative(const BasicGridFunction<Scalar>& u,
                                             FractionalOrder order) {
  if (order.value() == 0.0) return u;
  if (order.value() == 1.0) return fd_derivative(u);
  return fd_derivative(left_frac_integral(u, order.complement()));
}

/// Right Riemann-Liouville derivative, computed as -d/dt I^{1-alpha}_{b-} u.
template <typename Scalar>
BasicGridFunction<Scalar> right_rl_derivative(const BasicGridFunction<Scalar>& u,
                                              FractionalOrder order) {
  if (order.value() == 0.0) return u;
  if (order.value() == 1.0) return -fd_derivative(u);
  return -fd_derivative(right_frac_integral(u, order.complement()));
}

enum class Side { left, right };

/// coeff * (t - a)^beta (left-anchored) or coeff * (b - t)^beta (right-anchored).
/// beta >= 1 keeps the function in W^{1,1} with a continuous derivative.
struct PowerFunction {
  double beta = 1.0;
  Side side = Side::left;
  double coeff = 1.0;
};

template <typename Scalar>
BasicGridFunction<Scalar> sample(const PowerFunction& f, const BasicGrid<Scalar>& grid) {
  if (!(f.beta >= 1.0)) throw DomainError("power function: beta must be >= 1");
  const Scalar beta = static_cast<Scalar>(f.beta);
  const Scalar c = static_cast<Scalar>(f.coeff);
  return sample(
      [&](Scalar t) {
        const Scalar s = f.side == Side::left ? t - grid.a() : grid.b() - t;
        return c * std::pow(std::max(s, Scalar(0)), beta);
      },
      grid);
}

enum class PowerOp { left_int, right_int, left_der, right_der };

/// Closed-form image of (t-a)^beta (left ops) or (b-t)^beta (right ops):
///   Gamma(beta+1) / Gamma(beta+1 +- alpha) * s^(beta +- alpha)
/// with s the distance to the anchoring endpoint. Independent of the
/// quadrature code; used as the reference in operator tests.
template <typename Scalar>
BasicGridFunction<Scalar> power_rule_oracle(double beta, FractionalOrder order, PowerOp op,
                                            const BasicGrid<Scalar>& grid) {
  const bool derivative = op == PowerOp::left_der || op == PowerOp::right_der;
  if (!std::isfinite(beta) || beta < 0.0 || (derivative && beta < 1.0)) {
    throw DomainError("power_rule_oracle: beta out of range for this operator");
  }
  const bool left = op == PowerOp::left_int || op == PowerOp::left_der;
  const Scalar b = static_cast<Scalar>(beta);
  const Scalar alpha = static_cast<Scalar>(order.value());
  const Scalar shift = derivative ? -alpha : alpha;
  const Scalar coeff = gamma(b + Scalar(1)) / gamma(b + Scalar(1) + shift);
  return sample(
      [&](Scalar t) {
        const Scalar s = std::max(left ? t - grid.a() : grid.b() - t, Scalar(0));
        return coeff * std::pow(s, b + shift);
      },
      grid);
}

}  // namespace fracvar
