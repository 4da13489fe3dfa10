#include "fracvar/identities.hpp"

#include "fracvar/duality.hpp"
#include "fracvar/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracvar {

namespace {

using enum IdentityId;
using enum IdentityShape;
using enum OrderKind;

constexpr std::array<IdentityInfo, kIdentityCount> kCatalog{{
    {int_dual_left, "INT_DUAL_LEFT", "I^a_{a+} f* = (I^a_{b-} f)*", pointwise, 1, single, false, 1},
    {int_dual_right, "INT_DUAL_RIGHT", "I^a_{b-} f* = (I^a_{a+} f)*", pointwise, 1, single, false, 1},
    {int_dual_left_inv, "INT_DUAL_LEFT_INV", "I^a_{a+} f = (I^a_{b-} f*)*", pointwise, 1, single,
     false, 1},
    {int_dual_right_inv, "INT_DUAL_RIGHT_INV", "I^a_{b-} f = (I^a_{a+} f*)*", pointwise, 1, single,
     false, 1},
    {der_dual_left, "DER_DUAL_LEFT", "D^a_{a+} f* = -(D^a_{b-} f)*", pointwise, 1, single, true, -1},
    {der_dual_right, "DER_DUAL_RIGHT", "D^a_{b-} f* = -(D^a_{a+} f)*", pointwise, 1, single, true,
     -1},
    {der_dual_left_sc, "DER_DUAL_LEFT_SC", "D^a_{a+} f* = (D^a_{b-} (-f))*", pointwise, 1, single,
     true, -1},
    {der_dual_right_exp, "DER_DUAL_RIGHT_EXP", "D^a_{b-} f = -(D^a_{a+} f*)*", pointwise, 1, single,
     true, -1},
    {der_dual_right_sc, "DER_DUAL_RIGHT_SC", "D^a_{b-} f* = (D^a_{a+} (-f))*", pointwise, 1, single,
     true, -1},
    {der_dual_left_exp, "DER_DUAL_LEFT_EXP", "D^a_{a+} f = -(D^a_{b-} f*)*", pointwise, 1, single,
     true, -1},
    {ibp_int_classical, "IBP_INT_CLASSICAL", "int phi I^a_{a+} psi = int (I^a_{b-} phi) psi", scalar,
     2, single, false, 1},
    {ibp_der_classical, "IBP_DER_CLASSICAL", "int phi D^a_{a+} psi = int (D^a_{b-} phi) psi", scalar,
     2, single, true, 1},
    {ibp_int_left_only, "IBP_INT_LEFT_ONLY", "int f (I^a_{a+} g)* = int (I^a_{a+} f) g*", scalar, 2,
     single, false, 1},
    {ibp_int_right_only, "IBP_INT_RIGHT_ONLY", "int f (I^a_{b-} g)* = int (I^a_{b-} f) g*", scalar,
     2, single, false, 1},
    {ibp_der_left_only, "IBP_DER_LEFT_ONLY", "int f (D^a_{a+} g)* = -int (D^a_{a+} f) g*", scalar, 2,
     single, true, -1},
    {ibp_der_right_only, "IBP_DER_RIGHT_ONLY", "int f (D^a_{b-} g)* = -int (D^a_{b-} f) g*", scalar,
     2, single, true, -1},
    {complement_compose, "COMPLEMENT_COMPOSE", "D^a1_{a+} D^a2_{a+} h = h'", pointwise, 1,
     complementary, true, 1},
    {frac_to_classical, "FRAC_TO_CLASSICAL", "int (D^a1_{a+} f) (D^a2_{a+} g)* = -int f' g*", scalar,
     2, complementary, true, -1},
    {frac_to_classical_dualed, "FRAC_TO_CLASSICAL_DUALED",
     "int (D^a1_{a+} f)* (D^a2_{a+} g) = -int (f')* g", scalar, 2, complementary, true, -1},
    {mixed_ibp, "MIXED_IBP", "int (D^a1_{a+} f) (D^a2_{b-} h) = int f' h", scalar, 2, complementary,
     true, 1},
    {dual_compose, "DUAL_COMPOSE", "D^a1_{a+} (D^a2_{b-} f)* = -(f*)'", pointwise, 1, complementary,
     true, -1},
}};

constexpr bool catalog_is_ordered() {
  for (std::size_t i = 0; i < kCatalog.size(); ++i) {
    if (static_cast<std::size_t>(kCatalog[i].id) != i) return false;
  }
  return true;
}
static_assert(catalog_is_ordered(), "catalog entries must follow IdentityId order");
static_assert(static_cast<std::size_t>(dual_compose) + 1 == kIdentityCount);

struct Sides {
  std::optional<GridFunction> lhs_fn, rhs_fn;
  double lhs = 0.0, rhs = 0.0;
};

GridFunction IL(const GridFunction& u, FractionalOrder a) { return left_frac_integral(u, a); }
GridFunction IR(const GridFunction& u, FractionalOrder a) { return right_frac_integral(u, a); }
GridFunction DL(const GridFunction& u, FractionalOrder a) { return left_rl_derivative(u, a); }
GridFunction DR(const GridFunction& u, FractionalOrder a) { return right_rl_derivative(u, a); }
double integral(const GridFunction& u) { return trapezoid_integral(u); }

Sides pointwise_sides(GridFunction lhs, GridFunction rhs) {
  Sides s;
  s.lhs_fn = std::move(lhs);
  s.rhs_fn = std::move(rhs);
  return s;
}

Sides scalar_sides(double lhs, double rhs) {
  Sides s;
  s.lhs = lhs;
  s.rhs = rhs;
  return s;
}

// Both sides exactly as stated; `a` is the single order or alpha1, `a2` alpha2.
Sides assemble(IdentityId id, const GridFunction& f, const GridFunction* g, FractionalOrder a,
               FractionalOrder a2) {
  switch (id) {
    case int_dual_left:
      return pointwise_sides(IL(dual(f), a), dual(IR(f, a)));
    case int_dual_right:
      return pointwise_sides(IR(dual(f), a), dual(IL(f, a)));
    case int_dual_left_inv:
      return pointwise_sides(IL(f, a), dual(IR(dual(f), a)));
    case int_dual_right_inv:
      return pointwise_sides(IR(f, a), dual(IL(dual(f), a)));
    case der_dual_left:
      return pointwise_sides(DL(dual(f), a), -dual(DR(f, a)));
    case der_dual_right:
      return pointwise_sides(DR(dual(f), a), -dual(DL(f, a)));
    case der_dual_left_sc:
      return pointwise_sides(DL(dual(f), a), dual(DR(-f, a)));
    case der_dual_right_exp:
      return pointwise_sides(DR(f, a), -dual(DL(dual(f), a)));
    case der_dual_right_sc:
      return pointwise_sides(DR(dual(f), a), dual(DL(-f, a)));
    case der_dual_left_exp:
      return pointwise_sides(DL(f, a), -dual(DR(dual(f), a)));
    case ibp_int_classical:
      return scalar_sides(integral(f * IL(*g, a)), integral(IR(f, a) * *g));
    case ibp_der_classical:
      return scalar_sides(integral(f * DL(*g, a)), integral(DR(f, a) * *g));
    case ibp_int_left_only:
      return scalar_sides(integral(f * dual(IL(*g, a))), integral(IL(f, a) * dual(*g)));
    case ibp_int_right_only:
      return scalar_sides(integral(f * dual(IR(*g, a))), integral(IR(f, a) * dual(*g)));
    case ibp_der_left_only:
      return scalar_sides(integral(f * dual(DL(*g, a))), -integral(DL(f, a) * dual(*g)));
    case ibp_der_right_only:
      return scalar_sides(integral(f * dual(DR(*g, a))), -integral(DR(f, a) * dual(*g)));
    case complement_compose:
      return pointwise_sides(DL(DL(f, a2), a), fd_derivative(f));
    case frac_to_classical:
      return scalar_sides(integral(DL(f, a) * dual(DL(*g, a2))),
                          -integral(fd_derivative(f) * dual(*g)));
    case frac_to_classical_dualed:
      return scalar_sides(integral(dual(DL(f, a)) * DL(*g, a2)),
                          -integral(dual(fd_derivative(f)) * *g));
    case mixed_ibp:
      return scalar_sides(integral(DL(f, a) * DR(*g, a2)), integral(fd_derivative(f) * *g));
    case dual_compose:
      return pointwise_sides(DL(dual(DR(f, a2)), a), -fd_derivative(dual(f)));
  }
  throw DomainError("evaluate_identity: unknown identity");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<std::string_view> split_family(std::string_view family) {
  const auto slash = family.find('/');
  if (slash == std::string_view::npos) return {family};
  return {family.substr(0, slash), family.substr(slash + 1)};
}

GridFunction make_one(std::string_view key, const Grid& grid, FractionalOrder image_order,
                      std::uint64_t seed, int salt) {
  if (key == "power1" || key == "power2" || key == "power3") {
    const double beta = key.back() - '0';
    return sample(PowerFunction{beta, Side::left, 1.0}, grid);
  }
  if (key == "bump") {
    const double a = grid.a(), b = grid.b();
    return sample([&](double t) { return (t - a) * (t - a) * (b - t) * (b - t); }, grid);
  }
  if (key == "left_image" || key == "right_image") {
    return image_of_polynomial(seeded_density(seed, salt), image_order, grid, key == "left_image");
  }
  throw DomainError("unknown family '" + std::string(key) + "'");
}

void check_orders(const IdentityInfo& info, const Orders& orders) {
  if (info.orders == single && orders.second) {
    throw DomainError(std::string(info.name) + " takes a single order");
  }
  if (info.orders == complementary) {
    if (!orders.second) {
      throw DomainError(std::string(info.name) + " takes a complementary order pair");
    }
    if (std::abs(orders.first.value() + orders.second->value() - 1.0) > 1e-12) {
      throw DomainError(std::string(info.name) + " needs alpha1 + alpha2 = 1");
    }
  }
}

}  // namespace

const std::array<IdentityInfo, kIdentityCount>& identity_catalog() { return kCatalog; }

const IdentityInfo& identity_info(IdentityId id) {
  return kCatalog.at(static_cast<std::size_t>(id));
}

std::optional<IdentityId> identity_from_name(std::string_view name) {
  for (const auto& info : kCatalog) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

IdentityReport evaluate_identity(IdentityId id, const GridFunction& u,
                                 const std::optional<GridFunction>& v, const Orders& orders,
                                 SignConvention convention, std::string family) {
  const auto& info = identity_info(id);
  check_orders(info, orders);
  if (info.operands == 2 && !v) {
    throw DomainError(std::string(info.name) + " needs two operands");
  }
  if (info.operands == 1 && v) {
    throw DomainError(std::string(info.name) + " takes one operand");
  }
  if (v) require_same_grid(u, *v, info.name.data());

  const FractionalOrder a2 = orders.second.value_or(orders.first);
  Sides sides = assemble(id, u, v ? &*v : nullptr, orders.first, a2);
  const double sign =
      convention == SignConvention::corrected ? static_cast<double>(info.corrected_rhs_sign) : 1.0;

  IdentityReport report{};
  report.id = id;
  report.alpha1 = orders.first.value();
  if (orders.second) report.alpha2 = orders.second->value();
  report.family = std::move(family);
  report.n = u.grid().n();

  if (info.shape == pointwise) {
    const GridFunction rhs = sign * *sides.rhs_fn;
    const GridFunction diff = *sides.lhs_fn - rhs;
    double diff_norm, rhs_norm;
    if (info.uses_derivatives) {
      const double delta = kInteriorFraction * u.grid().length();
      diff_norm = interior_sup_norm(diff, delta);
      rhs_norm = interior_sup_norm(rhs, delta);
      std::ostringstream kind;
      kind << "interior_sup(" << kInteriorFraction << ")";
      report.norm_kind = kind.str();
    } else {
      diff_norm = sup_norm(diff);
      rhs_norm = sup_norm(rhs);
      report.norm_kind = "sup";
    }
    report.residual = diff_norm / std::max(1.0, rhs_norm);
  } else {
    const double rhs = sign * sides.rhs;
    report.lhs = sides.lhs;
    report.rhs = rhs;
    report.residual = std::abs(sides.lhs - rhs) / std::max(1.0, std::abs(rhs));
    report.norm_kind = "abs";
  }
  return report;
}

std::vector<double> seeded_density(std::uint64_t seed, int salt) {
  std::vector<double> coeffs(3);
  std::uint64_t state = splitmix64(seed ^ (0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(salt + 1)));
  for (auto& c : coeffs) {
    state = splitmix64(state);
    const double magnitude = 0.5 + unit_from_bits(state);
    c = (state & 1U) ? -magnitude : magnitude;
  }
  return coeffs;
}

GridFunction image_of_polynomial(const std::vector<double>& coeffs, FractionalOrder alpha,
                                 const Grid& grid, bool left_anchored) {
  const double al = alpha.value();
  std::vector<double> scaled(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    scaled[k] = coeffs[k] * gamma(kk + 1.0) / gamma(kk + 1.0 + al);
  }
  return sample(
      [&](double t) {
        const double s = std::max(left_anchored ? t - grid.a() : grid.b() - t, 0.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < scaled.size(); ++k) {
          acc += scaled[k] * std::pow(s, static_cast<double>(k) + al);
        }
        return acc;
      },
      grid);
}

std::string_view default_family(IdentityId id) {
  switch (id) {
    case int_dual_left:
    case int_dual_right:
    case int_dual_left_inv:
    case int_dual_right_inv:
      return "power2";
    case der_dual_left:
    case der_dual_right:
    case der_dual_left_sc:
    case der_dual_right_exp:
    case der_dual_right_sc:
    case der_dual_left_exp:
    case dual_compose:
      return "bump";
    case ibp_int_classical:
      return "power2/power3";
    case ibp_int_left_only:
    case ibp_int_right_only:
      return "power2/bump";
    case ibp_der_classical:
      return "right_image/left_image";
    case ibp_der_left_only:
      return "left_image/left_image";
    case ibp_der_right_only:
      return "right_image/right_image";
    case complement_compose:
      return "power2";
    case frac_to_classical:
    case frac_to_classical_dualed:
      return "power2/left_image";
    case mixed_ibp:
      return "power2/right_image";
  }
  return "power2";
}

std::vector<std::string> family_keys() {
  return {"power1", "power2", "power3", "bump", "left_image", "right_image", "default"};
}

Operands make_operands(IdentityId id, std::string_view family, const Grid& grid,
                       const Orders& orders, std::uint64_t seed) {
  const auto& info = identity_info(id);
  if (family == "default") family = default_family(id);
  const auto parts = split_family(family);
  const FractionalOrder first_order = orders.first;
  const FractionalOrder second_order = orders.second.value_or(orders.first);
  if (info.operands == 1) {
    if (parts.size() != 1) {
      throw DomainError(std::string(info.name) + " takes one operand, got family '" +
                        std::string(family) + "'");
    }
    return {make_one(parts[0], grid, first_order, seed, 1), std::nullopt, std::string(family)};
  }
  const std::string_view k1 = parts[0];
  const std::string_view k2 = parts.size() > 1 ? parts[1] : parts[0];
  // complementary identities take the second operand's image order from alpha2
  const FractionalOrder image2 = info.orders == complementary ? second_order : first_order;
  return {make_one(k1, grid, first_order, seed, 1), make_one(k2, grid, image2, seed, 2),
          std::string(family)};
}

Orders orders_for(IdentityId id, double alpha) {
  return identity_info(id).orders == complementary ? Orders::complementary(alpha)
                                                   : Orders::single(alpha);
}

std::vector<IdentityReport> refinement_sweep(IdentityId id, std::string_view family,
                                             const Orders& orders, const std::vector<Index>& n_list,
                                             double a, double b, std::uint64_t seed,
                                             SignConvention convention) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw DomainError("refinement_sweep: n_list must be strictly ascending");
    }
  }
  std::vector<IdentityReport> reports;
  reports.reserve(n_list.size());
  for (const Index n : n_list) {
    const Grid grid(a, b, n);
    auto ops = make_operands(id, family, grid, orders, seed);
    reports.push_back(evaluate_identity(id, ops.u, ops.v, orders, convention, ops.family));
  }
  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    const double r0 = reports[i].residual, r1 = reports[i + 1].residual;
    if (std::isfinite(r0) && std::isfinite(r1) && r0 > 1e-12 && r1 > 1e-12) {
      const double ratio = static_cast<double>(n_list[i + 1]) / static_cast<double>(n_list[i]);
      reports[i].observed_order = std::log(r0 / r1) / std::log(ratio);
    }
  }
  return reports;
}

std::vector<IdentityReport> default_suite(const std::vector<double>& alphas,
                                          const std::vector<Index>& n_list, double a, double b,
                                          std::uint64_t seed, const std::optional<IdentityId>& only,
                                          SignConvention convention) {
  std::vector<IdentityReport> rows;
  for (const auto& info : kCatalog) {
    if (only && *only != info.id) continue;
    for (const double alpha : alphas) {
      const Orders orders = orders_for(info.id, alpha);
      for (const Index n : n_list) {
        const Grid grid(a, b, n);
        auto ops = make_operands(info.id, "default", grid, orders, seed);
        rows.push_back(evaluate_identity(info.id, ops.u, ops.v, orders, convention, ops.family));
      }
    }
  }
  return rows;
}

double residual_tolerance(IdentityId id) {
  switch (id) {
    case int_dual_left:
    case int_dual_right:
    case int_dual_left_inv:
    case int_dual_right_inv:
      return 1e-6;
    case der_dual_left:
    case der_dual_right:
    case der_dual_left_sc:
    case der_dual_right_exp:
    case der_dual_right_sc:
    case der_dual_left_exp:
    case complement_compose:
    case dual_compose:
      return 1e-2;
    case ibp_int_classical:
    case ibp_der_classical:
    case ibp_int_left_only:
    case ibp_int_right_only:
    case ibp_der_left_only:
    case ibp_der_right_only:
      return 1e-4;
    case frac_to_classical:
    case frac_to_classical_dualed:
    case mixed_ibp:
      return 1e-3;
  }
  return 0.0;
}

}  // namespace fracvar
