#pragma once

// Catalog of duality and integration-by-parts identities for the
// Riemann-Liouville operators, evaluated as residuals on grid functions.
//
// Every identity is assembled exactly as stated (left side minus right
// side). A number of the derivative statements carry the wrong overall sign
// for the right-hand side: with the standard definition of the right
// derivative (leading minus sign) the reflection relation is
//   D^a_{a+} f* = (D^a_{b-} f)*,
// not its negative. SignConvention::corrected flips the right-hand side of
// exactly those entries so both readings can be measured side by side.

#include "fracvar/grid.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracvar {

enum class IdentityId {
  int_dual_left,
  int_dual_right,
  int_dual_left_inv,
  int_dual_right_inv,
  der_dual_left,
  der_dual_right,
  der_dual_left_sc,
  der_dual_right_exp,
  der_dual_right_sc,
  der_dual_left_exp,
  ibp_int_classical,
  ibp_der_classical,
  ibp_int_left_only,
  ibp_int_right_only,
  ibp_der_left_only,
  ibp_der_right_only,
  complement_compose,
  frac_to_classical,
  frac_to_classical_dualed,
  mixed_ibp,
  dual_compose,
};

inline constexpr std::size_t kIdentityCount = 21;

enum class IdentityShape { pointwise, scalar };
enum class OrderKind { single, complementary };
enum class SignConvention { printed, corrected };

struct IdentityInfo {
  IdentityId id;
  std::string_view name;     // upper-case tag used in reports and --filter
  std::string_view formula;  // left side = right side, plain text
  IdentityShape shape;
  int operands;  // 1 or 2
  OrderKind orders;
  bool uses_derivatives;
  // Sign that turns the stated right-hand side into the one consistent with
  // the operator definitions (+1 when the statement is already consistent).
  int corrected_rhs_sign;
};

const std::array<IdentityInfo, kIdentityCount>& identity_catalog();
const IdentityInfo& identity_info(IdentityId id);
std::optional<IdentityId> identity_from_name(std::string_view name);

/// Either one order alpha, or a complementary pair alpha1 + alpha2 = 1.
struct Orders {
  FractionalOrder first;
  std::optional<FractionalOrder> second;

  static Orders single(double alpha) { return {FractionalOrder(alpha), std::nullopt}; }
  static Orders pair(double alpha1, double alpha2) {
    return {FractionalOrder(alpha1), FractionalOrder(alpha2)};
  }
  static Orders complementary(double alpha1) { return pair(alpha1, 1.0 - alpha1); }
};

struct IdentityReport {
  IdentityId id;
  double alpha1 = 0.0;
  std::optional<double> alpha2;
  std::string family;
  Index n = 0;
  std::string norm_kind;
  double residual = 0.0;
  std::optional<double> observed_order;
  // raw sides, for diagnostics (scalar identities only)
  std::optional<double> lhs;
  std::optional<double> rhs;
};

/// Interior window used for pointwise identities with RL derivatives, as a
/// fraction of b - a.
inline constexpr double kInteriorFraction = 0.05;

/// residual = ||LHS - RHS|| / max(1, ||RHS||).
IdentityReport evaluate_identity(IdentityId id, const GridFunction& u,
                                 const std::optional<GridFunction>& v, const Orders& orders,
                                 SignConvention convention = SignConvention::printed,
                                 std::string family = "custom");

// ---------------------------------------------------------------------------
// Test-function families

/// Operands for one identity on one grid.
struct Operands {
  GridFunction u;
  std::optional<GridFunction> v;
  std::string family;
};

/// Family keys:
///   power1, power2, power3   (t - a)^beta
///   bump                     (t - a)^2 (b - t)^2
///   left_image, right_image  I^alpha_{a+} w, I^alpha_{b-} w for a quadratic w
///                            whose coefficients are drawn from the seed
///   default                  the per-identity default listed in default_family()
/// Two-operand identities accept "first/second"; a single key is used for both.
Operands make_operands(IdentityId id, std::string_view family, const Grid& grid,
                       const Orders& orders, std::uint64_t seed);

std::string_view default_family(IdentityId id);
std::vector<std::string> family_keys();

/// Closed-form sample of I^alpha w for w = sum_k c_k s^k, s the distance to
/// the anchoring endpoint. Such functions lie in I^alpha(L^p) by construction.
GridFunction image_of_polynomial(const std::vector<double>& coeffs, FractionalOrder alpha,
                                 const Grid& grid, bool left_anchored);

/// Quadratic density coefficients derived deterministically from a seed.
std::vector<double> seeded_density(std::uint64_t seed, int salt);

// ---------------------------------------------------------------------------
// Suites

/// One report per n; observed_order = log2(r(n) / r(2n)) on the coarser
/// report, present when both residuals are finite and above 1e-12.
std::vector<IdentityReport> refinement_sweep(IdentityId id, std::string_view family,
                                             const Orders& orders, const std::vector<Index>& n_list,
                                             double a = 0.0, double b = 1.0,
                                             std::uint64_t seed = 1,
                                             SignConvention convention = SignConvention::printed);

/// Orders used for identity `id` when the suite is driven by a single alpha:
/// complementary identities use (alpha, 1 - alpha).
Orders orders_for(IdentityId id, double alpha);

/// Catalog order x alpha x n, default family per identity.
std::vector<IdentityReport> default_suite(const std::vector<double>& alphas,
                                          const std::vector<Index>& n_list, double a = 0.0,
                                          double b = 1.0, std::uint64_t seed = 1,
                                          const std::optional<IdentityId>& only = std::nullopt,
                                          SignConvention convention = SignConvention::printed);

/// Frozen residual tolerance for an identity at the default suite sizes.
double residual_tolerance(IdentityId id);

}  // namespace fracvar
