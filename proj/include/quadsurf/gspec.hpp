// The prescribed boundary datum g: constant, radial power k|x|^alpha, or a
// tabulated grid field. Positivity is enforced at every evaluated point.
#pragma once

#include "quadsurf/core.hpp"

namespace quadsurf {

template <class Scalar>
struct GSpec {
  enum class Kind { kConstant, kRadialPower, kTable };

  Kind kind = Kind::kConstant;
  Scalar k = 1;
  Scalar alpha = 0;
  ScalarField<Scalar> table;

  static GSpec constant(Scalar k) {
    GSpec g;
    g.kind = Kind::kConstant;
    g.k = k;
    return g;
  }
  static GSpec radial_power(Scalar k, Scalar alpha) {
    GSpec g;
    g.kind = Kind::kRadialPower;
    g.k = k;
    g.alpha = alpha;
    return g;
  }
  static GSpec tabulated(ScalarField<Scalar> field) {
    GSpec g;
    g.kind = Kind::kTable;
    g.table = std::move(field);
    return g;
  }

  Scalar eval(const Vec2<Scalar>& p) const {
    Scalar v;
    switch (kind) {
      case Kind::kConstant: v = k; break;
      case Kind::kRadialPower: v = k * std::pow(p.norm(), alpha); break;
      default: v = table.sample(p); break;
    }
    if (!(v > 0))
      throw std::domain_error("GSpec: g must be positive at evaluated points");
    return v;
  }
};

}  // namespace quadsurf
