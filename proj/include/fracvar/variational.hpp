#pragma once

// Variational problems whose Lagrangian depends on t, x, xdot, the left
// derivative D^{a1}_{a+} x and the dual of the left derivative
// (D^{a2}_{a+} x)*. Actions, first variations, Euler-Lagrange residuals, a
// Ritz solver over a sine basis, and the dissipative oscillator built from a
// product of the two fractional arguments.

#include "fracvar/grid.hpp"
#include "fracvar/identities.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fracvar {

/// Evaluator (t, x, xdot, u, v) -> real.
using LagrangianFn = std::function<double(double, double, double, double, double)>;

/// L and its partials with respect to x (d2), xdot (d3), u (d4) and v (d5),
/// where u = (D^{alpha1}_{a+} x)(t) and v = (D^{alpha2}_{a+} x)*(t).
struct LagrangianSpec {
  LagrangianFn L;
  LagrangianFn d2;
  LagrangianFn d3;
  LagrangianFn d4;
  LagrangianFn d5;
  FractionalOrder alpha1{0.5};
  FractionalOrder alpha2{0.5};
};

/// L = 1/2 xdot^2 - 1/2 k x^2, no fractional dependence.
LagrangianSpec classical_oscillator(double k = 1.0);

/// Finite-difference audit of the supplied partials at random points.
struct PartialsCheck {
  double max_rel_error = 0.0;
  int worst_partial = 0;  // 2..5, 0 when all are exact
};

/// Central differences of L in each argument compared with d2..d5 at `samples`
/// points drawn from t in [a, b] and x, xdot, u, v in [-2, 2].
PartialsCheck check_partials(const LagrangianSpec& spec, double a, double b,
                             std::uint64_t seed, int samples = 64);

struct BoundaryConditions {
  double xa = 0.0;
  double xb = 0.0;
};

enum class RitzMethod {
  gradient_descent,  // backtracking descent on the action
  newton,            // finite-difference Hessian, merit |grad|^2
};

struct RitzConfig {
  Index basis_size = 12;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  double step_shrink = 0.5;
  RitzMethod method = RitzMethod::gradient_descent;
};

void validate(const RitzConfig& cfg);

enum class RitzStatus { converged, max_iters_reached, line_search_failed };
std::string_view to_string(RitzStatus s);

struct RitzResult {
  GridFunction x;
  Vector<double> coefficients;
  RitzStatus status = RitzStatus::max_iters_reached;
  int iterations = 0;
  double gradient_sup = 0.0;
  double action = 0.0;
};

/// m xddot + U'(x) +- c (xdot)* = 0 data. U and Uprime act on x only.
struct DissipativeParams {
  double mass = 1.0;
  double friction = 0.0;
  std::function<double(double)> U;
  std::function<double(double)> Uprime;
  // k when U = 1/2 k x^2; required by solve_linear_eom.
  std::optional<double> stiffness;

  static DissipativeParams harmonic(double mass, double friction, double k);
};

/// Max relative mismatch between Uprime and a central difference of U.
double check_potential(const DissipativeParams& p, std::uint64_t seed, int samples = 64);

// ---------------------------------------------------------------------------

/// u = D^{alpha1}_{a+} x and v = (D^{alpha2}_{a+} x)*.
std::pair<GridFunction, GridFunction> fractional_arguments(const GridFunction& x,
                                                           FractionalOrder alpha1,
                                                           FractionalOrder alpha2);

/// Trapezoid integral of L(t, x, xdot, u, v).
double action_value(const LagrangianSpec& spec, const GridFunction& x);

/// int d2 h + d3 hdot + d4 D^{alpha1} h + d5 (D^{alpha2} h)*, for h vanishing
/// at both endpoints.
double first_variation(const LagrangianSpec& spec, const GridFunction& x, const GridFunction& h);

/// d2 - d/dt d3 + s [ (D^{alpha1}(d4)*)* + (D^{alpha2} d5)* ] with s = -1 as
/// stated (printed) and s = +1 under the corrected sign.
GridFunction el_residual(const LagrangianSpec& spec, const GridFunction& x,
                         SignConvention convention = SignConvention::printed);

/// The four summands of el_residual, sign already applied.
struct ElTerms {
  GridFunction potential;  // d2
  GridFunction inertial;   // -d/dt d3
  GridFunction frac_left;  // s (D^{alpha1}(d4)*)*
  GridFunction frac_dual;  // s (D^{alpha2} d5)*
};
ElTerms el_terms(const LagrangianSpec& spec, const GridFunction& x,
                 SignConvention convention = SignConvention::printed);

/// |first_variation(x, h) - int el_residual(x) h|.
double consistency_variation_vs_residual(const LagrangianSpec& spec, const GridFunction& x,
                                         const GridFunction& h,
                                         SignConvention convention = SignConvention::printed);

/// L = 1/2 m xdot^2 - U(x) + 1/2 c u v with alpha2 = 1 - alpha1.
LagrangianSpec dissipative_lagrangian(const DissipativeParams& p, FractionalOrder alpha1);

/// U'(x) + s c (xdot)* + m xddot, s = +1 as stated and -1 under the corrected sign.
GridFunction eom_residual(const GridFunction& x, const DissipativeParams& p,
                          SignConvention convention = SignConvention::printed);

/// Affine interpolant of the boundary values.
GridFunction boundary_line(const BoundaryConditions& bc, const Grid& grid);

/// Stationary point of the action over line(bc) + span{sin(k pi (t-a)/(b-a))}.
RitzResult ritz_solve(const LagrangianSpec& spec, const BoundaryConditions& bc, const Grid& grid,
                      const RitzConfig& cfg);

/// Dense solve of k x + s c P D1 x + m D2 x = 0 at interior nodes with pinned
/// boundary rows; s follows eom_residual.
GridFunction solve_linear_eom(const DissipativeParams& p, const BoundaryConditions& bc,
                              const Grid& grid,
                              SignConvention convention = SignConvention::printed);

}  // namespace fracvar
