// Level-set representation of the working domain: phi < 0 inside, signed
// distance away from the zero set. Reinitialization is a gated
// Russo-Smereka relaxation: fields that already satisfy |grad phi| ~ 1 near
// the interface pass through untouched, everything else is relaxed with a
// subcell anchor so the zero set stays put.
#pragma once

#include <cmath>

#include "quadsurf/core.hpp"
#include "quadsurf/shapes.hpp"

namespace quadsurf {

template <class Scalar>
struct LevelSet {
  Grid<Scalar> grid;
  ArrayX<Scalar> phi;  // node samples, negative inside

  LevelSet() = default;
  explicit LevelSet(const Grid<Scalar>& g)
      : grid(g), phi(ArrayX<Scalar>::Zero(g.node_count())) {}

  Scalar& at(Index i, Index j) { return phi[grid.idx(i, j)]; }
  Scalar at(Index i, Index j) const { return phi[grid.idx(i, j)]; }
  bool inside(Index i, Index j) const { return at(i, j) < Scalar(0); }

  ScalarField<Scalar> as_field() const {
    ScalarField<Scalar> f(grid);
    f.values = phi;
    return f;
  }

  Scalar sample(const Vec2<Scalar>& p) const {
    Index i, j;
    Scalar fx, fy;
    grid.locate(p, i, j, fx, fy);
    const Scalar v00 = at(i, j), v10 = at(i + 1, j);
    const Scalar v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
    return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
           (1 - fx) * fy * v01 + fx * fy * v11;
  }

  bool has_interface() const {
    const bool any_neg = (phi < Scalar(0)).any();
    const bool any_pos = (phi >= Scalar(0)).any();
    return any_neg && any_pos;
  }
};

namespace detail {

template <class Scalar>
Vec2<Scalar> phi_central_gradient(const LevelSet<Scalar>& ls, Index i,
                                  Index j) {
  const Grid<Scalar>& g = ls.grid;
  const Index ie = std::min(i + 1, g.nx), iw = std::max<Index>(i - 1, 0);
  const Index jn = std::min(j + 1, g.ny), js = std::max<Index>(j - 1, 0);
  return Vec2<Scalar>(
      (ls.at(ie, j) - ls.at(iw, j)) / (Scalar(ie - iw) * g.hx()),
      (ls.at(i, jn) - ls.at(i, js)) / (Scalar(jn - js) * g.hy()));
}

// Nodes belonging to a cell with a sign change (the subcell-anchored set).
template <class Scalar>
BoolArray interface_nodes(const LevelSet<Scalar>& ls) {
  const Grid<Scalar>& g = ls.grid;
  BoolArray mark = BoolArray::Constant(g.node_count(), false);
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      const Scalar c = ls.at(i, j);
      const bool neg = c < 0;
      bool crossing = false;
      if (i > 0 && (ls.at(i - 1, j) < 0) != neg) crossing = true;
      if (i < g.nx && (ls.at(i + 1, j) < 0) != neg) crossing = true;
      if (j > 0 && (ls.at(i, j - 1) < 0) != neg) crossing = true;
      if (j < g.ny && (ls.at(i, j + 1) < 0) != neg) crossing = true;
      if (crossing) mark[g.idx(i, j)] = true;
    }
  return mark;
}

// Godunov upwind |grad phi| for the eikonal relaxation.
template <class Scalar>
Scalar godunov_gradient_norm(const LevelSet<Scalar>& ls, Index i, Index j,
                             Scalar sign) {
  const Grid<Scalar>& g = ls.grid;
  const Scalar c = ls.at(i, j);
  const Scalar dxm = (i > 0) ? (c - ls.at(i - 1, j)) / g.hx() : Scalar(0);
  const Scalar dxp = (i < g.nx) ? (ls.at(i + 1, j) - c) / g.hx() : Scalar(0);
  const Scalar dym = (j > 0) ? (c - ls.at(i, j - 1)) / g.hy() : Scalar(0);
  const Scalar dyp = (j < g.ny) ? (ls.at(i, j + 1) - c) / g.hy() : Scalar(0);
  Scalar gx2, gy2;
  if (sign > 0) {
    gx2 = std::max(std::max(dxm, Scalar(0)) * std::max(dxm, Scalar(0)),
                   std::min(dxp, Scalar(0)) * std::min(dxp, Scalar(0)));
    gy2 = std::max(std::max(dym, Scalar(0)) * std::max(dym, Scalar(0)),
                   std::min(dyp, Scalar(0)) * std::min(dyp, Scalar(0)));
  } else {
    gx2 = std::max(std::min(dxm, Scalar(0)) * std::min(dxm, Scalar(0)),
                   std::max(dxp, Scalar(0)) * std::max(dxp, Scalar(0)));
    gy2 = std::max(std::min(dym, Scalar(0)) * std::min(dym, Scalar(0)),
                   std::max(dyp, Scalar(0)) * std::max(dyp, Scalar(0)));
  }
  return std::sqrt(gx2 + gy2);
}

}  // namespace detail

// Exact signed distance to a primitive or a union of primitives. Shapes
// must sit at least 5h inside the hold-all box.
template <class Scalar, class ShapeLike>
LevelSet<Scalar> signed_distance(const ShapeLike& shape,
                                 const Grid<Scalar>& grid) {
  Vec2<Scalar> lo, hi;
  if constexpr (std::is_same_v<ShapeLike, std::vector<Shape<Scalar>>>) {
    lo = Vec2<Scalar>::Constant(std::numeric_limits<Scalar>::max());
    hi = Vec2<Scalar>::Constant(std::numeric_limits<Scalar>::lowest());
    for (const auto& s : shape) {
      Vec2<Scalar> slo, shi;
      bounding_box_of(s, slo, shi);
      lo = lo.cwiseMin(slo);
      hi = hi.cwiseMax(shi);
    }
  } else if constexpr (std::is_same_v<ShapeLike, Shape<Scalar>>) {
    bounding_box_of(shape, lo, hi);
  } else {
    bounding_box_of(Shape<Scalar>(shape), lo, hi);
  }
  const Scalar margin = 5 * grid.hmax();
  if ((lo.array() - grid.box.min().array() < margin).any() ||
      (grid.box.max().array() - hi.array() < margin).any())
    throw std::invalid_argument(
        "signed_distance: shape must sit at least 5h inside the box");

  LevelSet<Scalar> ls(grid);
  for (Index j = 0; j <= grid.ny; ++j)
    for (Index i = 0; i <= grid.nx; ++i)
      ls.at(i, j) = signed_distance_to(shape, grid.node(i, j));
  return ls;
}

// Level set from an arbitrary implicit function (tests, ellipses, ...).
// The result is generally not a distance function; reinitialize as needed.
template <class Scalar, class F>
LevelSet<Scalar> level_set_from_function(const Grid<Scalar>& grid, F&& f) {
  LevelSet<Scalar> ls(grid);
  for (Index j = 0; j <= grid.ny; ++j)
    for (Index i = 0; i <= grid.nx; ++i) ls.at(i, j) = f(grid.node(i, j));
  return ls;
}

struct ReinitParams {
  int sweeps = 20;
  double cfl = 0.45;
  // Skip the relaxation when |grad phi| is already within this deviation
  // from 1 on the interface band; exact distance fields pass through.
  double skip_tolerance = 0.05;
};

template <class Scalar>
LevelSet<Scalar> reinitialize(const LevelSet<Scalar>& input,
                              const ReinitParams& params = {}) {
  if (!input.has_interface())
    throw std::runtime_error("reinitialize: empty or full domain");

  const Grid<Scalar>& g = input.grid;
  const Scalar h = g.hmin();
  const BoolArray anchor = detail::interface_nodes(input);

  // Quality gate on the band around the zero set.
  const Scalar band = 5 * g.hmax();
  Scalar worst = 0;
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      const Index id = g.idx(i, j);
      if (!anchor[id] && std::abs(input.phi[id]) >= band) continue;
      const Scalar gn = detail::phi_central_gradient(input, i, j).norm();
      worst = std::max(worst, std::abs(gn - Scalar(1)));
    }
  if (worst <= Scalar(params.skip_tolerance)) return input;

  LevelSet<Scalar> ls = input;
  const LevelSet<Scalar>& ref = input;  // sign and anchor source

  // Subcell target distances for anchored nodes.
  ArrayX<Scalar> target(g.node_count());
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      const Index id = g.idx(i, j);
      if (!anchor[id]) continue;
      const Scalar gn =
          std::max(detail::phi_central_gradient(ref, i, j).norm(),
                   Scalar(1e-12));
      target[id] = ref.phi[id] / gn;
    }

  const Scalar dt = Scalar(params.cfl) * h;
  ArrayX<Scalar> next = ls.phi;
  for (int sweep = 0; sweep < params.sweeps; ++sweep) {
    for (Index j = 0; j <= g.ny; ++j)
      for (Index i = 0; i <= g.nx; ++i) {
        const Index id = g.idx(i, j);
        const Scalar p0 = ref.phi[id];
        const Scalar sgn = (p0 < 0) ? Scalar(-1) : Scalar(1);
        if (anchor[id]) {
          const Scalar cur = ls.phi[id];
          next[id] = cur - (dt / h) * (sgn * std::abs(cur) - target[id]);
        } else {
          const Scalar smooth =
              p0 / std::sqrt(p0 * p0 + h * h);  // smeared sign
          const Scalar gn = detail::godunov_gradient_norm(ls, i, j, sgn);
          next[id] = ls.phi[id] - dt * smooth * (gn - Scalar(1));
        }
      }
    ls.phi.swap(next);
  }
  return ls;
}

// div(grad phi / |grad phi|) by centered differences. Only meaningful near
// the interface; evaluated on |phi| < 3h and zero elsewhere.
template <class Scalar>
ScalarField<Scalar> curvature(const LevelSet<Scalar>& ls) {
  const Grid<Scalar>& g = ls.grid;
  const Scalar hx = g.hx(), hy = g.hy();
  const Scalar band = 3 * g.hmax();
  ScalarField<Scalar> kappa(g);
  for (Index j = 1; j < g.ny; ++j)
    for (Index i = 1; i < g.nx; ++i) {
      if (std::abs(ls.at(i, j)) >= band) continue;
      const Scalar px = (ls.at(i + 1, j) - ls.at(i - 1, j)) / (2 * hx);
      const Scalar py = (ls.at(i, j + 1) - ls.at(i, j - 1)) / (2 * hy);
      const Scalar norm2 = px * px + py * py;
      if (norm2 < Scalar(0.01))
        throw std::runtime_error("curvature: singular gradient near interface");
      const Scalar pxx =
          (ls.at(i + 1, j) - 2 * ls.at(i, j) + ls.at(i - 1, j)) / (hx * hx);
      const Scalar pyy =
          (ls.at(i, j + 1) - 2 * ls.at(i, j) + ls.at(i, j - 1)) / (hy * hy);
      const Scalar pxy = (ls.at(i + 1, j + 1) - ls.at(i - 1, j + 1) -
                          ls.at(i + 1, j - 1) + ls.at(i - 1, j - 1)) /
                         (4 * hx * hy);
      kappa.at(i, j) =
          (pxx * py * py - 2 * px * py * pxy + pyy * px * px) /
          std::pow(norm2, Scalar(1.5));
    }
  return kappa;
}

// Pointwise union with another level set (both on the same grid).
template <class Scalar>
LevelSet<Scalar> level_set_union(const LevelSet<Scalar>& a,
                                 const LevelSet<Scalar>& b) {
  if (!a.grid.same_as(b.grid))
    throw std::invalid_argument("level_set_union: grid mismatch");
  LevelSet<Scalar> out = a;
  out.phi = a.phi.min(b.phi);
  return out;
}

}  // namespace quadsurf
