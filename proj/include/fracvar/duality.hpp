#pragma once

#include "fracvar/grid.hpp"

namespace fracvar {

/// Dual function f*(t) = f(b - t + a). On a uniform grid this is an exact
/// reversal of the node values.
template <typename Scalar>
BasicGridFunction<Scalar> dual(const BasicGridFunction<Scalar>& u) {
  return {u.grid(), u.values().reverse().eval()};
}

/// Trapezoid integral of the pointwise product u * v.
template <typename Scalar>
Scalar pairing(const BasicGridFunction<Scalar>& u, const BasicGridFunction<Scalar>& v) {
  return trapezoid_integral(u * v);
}

}  // namespace fracvar
