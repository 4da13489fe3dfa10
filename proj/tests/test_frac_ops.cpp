#include "fracvar/frac_ops.hpp"

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <functional>

using namespace fracvar;

namespace {

// Direct quadrature of the Abel integrals; tanh-sinh absorbs the
// (t - tau)^(alpha - 1) endpoint singularity.
double left_integral_ref(const std::function<double(double)>& f, double a, double t, double alpha) {
  if (t <= a) return 0.0;
  boost::math::quadrature::tanh_sinh<double> q;
  const double v = q.integrate([&](double tau, double dist) {
    const double s = tau > 0.5 * (a + t) ? dist : t - tau;
    return std::pow(s, alpha - 1) * f(tau);
  }, a, t);
  return v / boost::math::tgamma(alpha);
}

double right_integral_ref(const std::function<double(double)>& f, double b, double t, double alpha) {
  if (t >= b) return 0.0;
  boost::math::quadrature::tanh_sinh<double> q;
  const double v = q.integrate([&](double tau, double dist) {
    const double s = tau < 0.5 * (t + b) ? -dist : tau - t;
    return std::pow(s, alpha - 1) * f(tau);
  }, t, b);
  return v / boost::math::tgamma(alpha);
}

double rel_interior_error(const GridFunction& got, const GridFunction& want) {
  const double delta = 0.05 * got.grid().length();
  return interior_sup_norm(got - want, delta) / std::max(1.0, interior_sup_norm(want, delta));
}

const PowerOp kOps[] = {PowerOp::left_int, PowerOp::right_int, PowerOp::left_der, PowerOp::right_der};

GridFunction apply(PowerOp op, const GridFunction& u, FractionalOrder a) {
  switch (op) {
    case PowerOp::left_int: return left_frac_integral(u, a);
    case PowerOp::right_int: return right_frac_integral(u, a);
    case PowerOp::left_der: return left_rl_derivative(u, a);
    case PowerOp::right_der: return right_rl_derivative(u, a);
  }
  return u;
}

Side side_of(PowerOp op) {
  return op == PowerOp::left_int || op == PowerOp::left_der ? Side::left : Side::right;
}

}  // namespace

TEST_CASE("power rule oracle: closed-form values") {
  const Grid g(0, 1, 4);
  const auto r = power_rule_oracle(1.0, FractionalOrder(0.5), PowerOp::left_int, g);
  // I^{1/2} t = t^{3/2} / Gamma(5/2)
  CHECK(r[4] == doctest::Approx(1.0 / std::tgamma(2.5)));
  const auto d = power_rule_oracle(2.0, FractionalOrder(0.5), PowerOp::right_der, g);
  CHECK(d[0] == doctest::Approx(2.0 / std::tgamma(2.5)));
  CHECK(d[4] == 0.0);
  CHECK_THROWS_AS(power_rule_oracle(0.5, FractionalOrder(0.5), PowerOp::left_der, g), DomainError);
  CHECK_THROWS_AS(power_rule_oracle(-1.0, FractionalOrder(0.5), PowerOp::left_int, g), DomainError);
}

TEST_CASE("operators match the power rule on every (op, beta, alpha)") {
  const Grid g(0, 1, 1024);
  for (const auto op : kOps) {
    const bool integral = op == PowerOp::left_int || op == PowerOp::right_int;
    for (double beta : {1.0, 2.0, 3.0}) {
      for (double alpha : {0.25, 0.5, 0.75}) {
        CAPTURE(static_cast<int>(op));
        CAPTURE(beta);
        CAPTURE(alpha);
        const FractionalOrder a(alpha);
        const auto u = sample(PowerFunction{beta, side_of(op)}, g);
        const double err = rel_interior_error(apply(op, u, a), power_rule_oracle(beta, a, op, g));
        CHECK(err <= (integral ? 1e-5 : 1e-4));
      }
    }
  }
}

TEST_CASE("left and right integrals agree with direct quadrature on non-polynomial data") {
  const Grid g(0.5, 2.0, 300);
  const std::function<double(double)> f = [](double t) { return std::exp(-t) * std::cos(3 * t); };
  const auto u = sample(f, g);
  for (double alpha : {0.2, 0.5, 0.9}) {
    const FractionalOrder a(alpha);
    const auto L = left_frac_integral(u, a);
    const auto R = right_frac_integral(u, a);
    for (Index i : {Index(1), Index(37), Index(150), Index(299), Index(300)}) {
      CAPTURE(alpha);
      CAPTURE(i);
      const double t = g.node(i);
      CHECK(L[i] == doctest::Approx(left_integral_ref(f, g.a(), t, alpha)).epsilon(1e-4));
    }
    for (Index i : {Index(0), Index(1), Index(150), Index(263), Index(299)}) {
      CAPTURE(alpha);
      CAPTURE(i);
      const double t = g.node(i);
      CHECK(R[i] == doctest::Approx(right_integral_ref(f, g.b(), t, alpha)).epsilon(1e-4));
    }
    CHECK(L[0] == 0.0);
    CHECK(R[300] == 0.0);
  }
}

TEST_CASE("degenerate orders") {
  const Grid g(0, 2, 64);
  const auto u = sample([](double t) { return std::sin(t) + t * t; }, g);
  const FractionalOrder zero(0.0), one(1.0);
  CHECK(left_frac_integral(u, zero).values() == u.values());
  CHECK(right_frac_integral(u, zero).values() == u.values());
  CHECK(left_rl_derivative(u, zero).values() == u.values());
  CHECK(right_rl_derivative(u, zero).values() == u.values());
  CHECK(left_rl_derivative(u, one).values() == fd_derivative(u).values());
  CHECK(right_rl_derivative(u, one).values() == (-fd_derivative(u)).values());

  // alpha = 1 integrals are running integrals: trapezoid is exact on linears
  const auto lin = sample([](double t) { return 2 * t + 1; }, g);
  const auto L = left_frac_integral(lin, one);
  const auto R = right_frac_integral(lin, one);
  for (Index i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    CHECK(L[i] == doctest::Approx(t * t + t).epsilon(1e-12));
    CHECK(R[i] == doctest::Approx(6 - t * t - t).epsilon(1e-12));
  }
}

TEST_CASE("integrals are exact on piecewise-linear data") {
  // the product rule integrates the linear interpolant exactly, so t is exact
  const Grid g(0, 1, 16);
  const FractionalOrder a(0.3);
  const auto u = sample(PowerFunction{1.0, Side::left}, g);
  CHECK(sup_norm(left_frac_integral(u, a) - power_rule_oracle(1.0, a, PowerOp::left_int, g)) < 1e-14);
  const auto v = sample(PowerFunction{1.0, Side::right}, g);
  CHECK(sup_norm(right_frac_integral(v, a) - power_rule_oracle(1.0, a, PowerOp::right_int, g)) < 1e-14);
}

TEST_CASE("linearity") {
  const Grid g(0, 1, 128);
  const auto u = sample([](double t) { return std::cos(t); }, g);
  const auto v = sample([](double t) { return t * t * t; }, g);
  const FractionalOrder a(0.4);
  for (const auto op : kOps) {
    const auto lhs = apply(op, 2.0 * u + v, a);
    const auto rhs = 2.0 * apply(op, u, a) + apply(op, v, a);
    CHECK(sup_norm(lhs - rhs) <= 1e-12 * std::max(1.0, sup_norm(rhs)));
  }
}

TEST_CASE("RL derivative of a constant") {
  // D^{1/2}_{0+} k = k t^{-1/2} / Gamma(1/2)
  const Grid g(0, 1, 2048);
  const double k = 3.0;
  const auto d = left_rl_derivative(GridFunction::constant(g, k), FractionalOrder(0.5));
  const auto want = sample([&](double t) { return t > 0 ? k / (std::sqrt(t) * std::tgamma(0.5)) : 0.0; }, g);
  CHECK(rel_interior_error(d, want) <= 1e-3);
}

TEST_CASE("convergence orders on the power family") {
  for (const auto op : kOps) {
    const bool integral = op == PowerOp::left_int || op == PowerOp::right_int;
    for (double beta : {2.0, 3.0}) {
      const FractionalOrder a(0.5);
      double prev = 0.0;
      for (Index n : {256, 512, 1024}) {
        const Grid g(0, 1, n);
        const double err = rel_interior_error(apply(op, sample(PowerFunction{beta, side_of(op)}, g), a),
                                              power_rule_oracle(beta, a, op, g));
        if (prev > 0) CHECK(std::log2(prev / err) >= (integral ? 1.5 : 0.8));
        prev = err;
      }
    }
  }
}

TEST_CASE("long double instantiation") {
  const BasicGrid<long double> g(0.0L, 1.0L, 256);
  const auto u = sample([](long double t) { return t * t; }, g);
  const FractionalOrder a(0.5);
  const auto L = left_frac_integral(u, a);
  const auto R = right_rl_derivative(sample([](long double t) { return (1 - t) * (1 - t); }, g), a);
  // I^{1/2} t^2 = 2 t^{5/2} / Gamma(7/2); D^{1/2}_{b-} (1-t)^2 = 2 (1-t)^{3/2} / Gamma(5/2)
  CHECK(static_cast<double>(L[256]) == doctest::Approx(2.0 / std::tgamma(3.5)).epsilon(1e-4));
  CHECK(static_cast<double>(R[128]) ==
        doctest::Approx(2.0 * std::pow(0.5, 1.5) / std::tgamma(2.5)).epsilon(1e-3));
}
