#include "fracvar/duality.hpp"
#include "fracvar/frac_ops.hpp"

#include <doctest.h>

#include <random>

using namespace fracvar;

namespace {

GridFunction random_function(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector<double> v(g.size());
  for (auto& x : v) x = normal(rng);
  return {g, v};
}

}  // namespace

TEST_CASE("dual reflects node values") {
  const Grid g(1, 3, 4);
  const auto u = sample([](double t) { return t; }, g);
  const auto d = dual(u);
  for (Index i = 0; i < g.size(); ++i) CHECK(d[i] == u[g.n() - i]);
  // f*(t) = f(b - t + a): the reflection of t is 4 - t
  const auto expected = sample([](double t) { return 4 - t; }, g);
  CHECK(sup_norm(d - expected) < 1e-15);
}

TEST_CASE("exact algebra of the dual on random data") {
  std::mt19937_64 rng(20240611);
  for (Index n : {2, 7, 64, 513}) {
    const Grid g(-0.5, 2.0, n);
    const auto f = random_function(g, rng);
    const auto h = random_function(g, rng);
    CHECK(dual(dual(f)).values() == f.values());
    CHECK(dual(f * h).values() == (dual(f) * dual(h)).values());
    CHECK(dual(-f).values() == (-dual(f)).values());
    CHECK(dual(f + h).values() == (dual(f) + dual(h)).values());
    // int f* g = int f g*
    const double lhs = pairing(dual(f), h);
    const double rhs = pairing(f, dual(h));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    CHECK(std::abs(pairing(f, h) - pairing(h, f)) <= 1e-12 * std::max(1.0, std::abs(pairing(f, h))));
  }
}

TEST_CASE("degenerate operator orders on random data") {
  std::mt19937_64 rng(99);
  const Grid g(0, 1, 200);
  const auto f = random_function(g, rng);
  const FractionalOrder zero(0.0), one(1.0);
  CHECK(left_frac_integral(dual(f), zero).values() == dual(right_frac_integral(f, zero)).values());
  CHECK(left_rl_derivative(f, one).values() == fd_derivative(f).values());
  CHECK(right_rl_derivative(f, one).values() == (-fd_derivative(f)).values());
  // with alpha = 1 the left derivative of f* is exactly the reflected right derivative
  CHECK(sup_norm(left_rl_derivative(dual(f), one) - dual(right_rl_derivative(f, one))) <= 1e-12 * sup_norm(fd_derivative(f)));
}

TEST_CASE("pairing is the trapezoid integral of the product") {
  const Grid g(0, 2, 10);
  const auto u = sample([](double t) { return t; }, g);
  const auto one = GridFunction::constant(g, 1.0);
  CHECK(pairing(u, one) == doctest::Approx(2.0));
  CHECK_THROWS_AS(pairing(u, GridFunction::constant(Grid(0, 2, 12), 1.0)), DomainError);
}

TEST_CASE("long double dual") {
  const BasicGrid<long double> g(0.0L, 1.0L, 5);
  const auto u = sample([](long double t) { return t * t; }, g);
  CHECK(dual(dual(u)).values() == u.values());
  CHECK(static_cast<double>(dual(u)[0]) == 1.0);
}
