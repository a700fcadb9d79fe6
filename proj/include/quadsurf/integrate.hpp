// Quadrature over a level-set domain and its boundary. Volume integrals use
// per-cell cut polygons (linear interface per cell, saddle cells split into
// four triangles around the centre); boundary integrals use the trapezoid
// rule on the marching-squares polylines.
#pragma once

#include <array>

#include "quadsurf/boundary.hpp"
#include "quadsurf/level_set.hpp"

namespace quadsurf {

namespace detail {

// Clip a convex polygon with per-vertex values against {value <= 0}.
template <class Scalar, size_t N>
int clip_negative(const std::array<Vec2<Scalar>, N>& pts,
                  const std::array<Scalar, N>& vals,
                  std::array<Vec2<Scalar>, N + 3>& out) {
  int m = 0;
  for (size_t k = 0; k < N; ++k) {
    const size_t k1 = (k + 1) % N;
    const bool in_a = vals[k] < 0, in_b = vals[k1] < 0;
    if (in_a) out[m++] = pts[k];
    if (in_a != in_b) {
      const Scalar t = vals[k] / (vals[k] - vals[k1]);
      out[m++] = pts[k] + t * (pts[k1] - pts[k]);
    }
  }
  return m;
}

template <class Scalar>
void polygon_area_centroid(const Vec2<Scalar>* pts, int m, Scalar& area,
                           Vec2<Scalar>& centroid) {
  area = 0;
  centroid = Vec2<Scalar>::Zero();
  for (int k = 0; k < m; ++k) {
    const Vec2<Scalar>& p = pts[k];
    const Vec2<Scalar>& q = pts[(k + 1) % m];
    const Scalar w = p.x() * q.y() - q.x() * p.y();
    area += w;
    centroid += w * (p + q);
  }
  area /= 2;
  if (std::abs(area) > Scalar(0)) centroid /= 6 * area;
}

}  // namespace detail

// Integral of h over {phi < 0}. h is any callable of the node position;
// use the ScalarField overload below for grid-sampled integrands.
template <class Scalar, class F,
          class = std::enable_if_t<std::is_invocable_v<F, Vec2<Scalar>>>>
Scalar volume_integral(const LevelSet<Scalar>& ls, F&& h) {
  const Grid<Scalar>& g = ls.grid;
  const Scalar cell_area = g.hx() * g.hy();
  Scalar total = 0;

  std::array<Vec2<Scalar>, 4> pts;
  std::array<Scalar, 4> vals;
  std::array<Vec2<Scalar>, 7> clipped;

  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      const Scalar v0 = ls.at(i, j), v1 = ls.at(i + 1, j);
      const Scalar v2 = ls.at(i + 1, j + 1), v3 = ls.at(i, j + 1);
      const int inside = (v0 < 0) + (v1 < 0) + (v2 < 0) + (v3 < 0);
      if (inside == 0) continue;
      if (inside == 4) {
        const Vec2<Scalar> c = g.node(i, j) +
                               Vec2<Scalar>(g.hx() / 2, g.hy() / 2);
        total += cell_area * h(c);
        continue;
      }
      pts = {g.node(i, j), g.node(i + 1, j), g.node(i + 1, j + 1),
             g.node(i, j + 1)};
      vals = {v0, v1, v2, v3};

      const bool saddle = (v0 < 0 && v2 < 0 && !(v1 < 0) && !(v3 < 0)) ||
                          (v1 < 0 && v3 < 0 && !(v0 < 0) && !(v2 < 0));
      if (!saddle) {
        const int m = detail::clip_negative(pts, vals, clipped);
        if (m >= 3) {
          Scalar area;
          Vec2<Scalar> c;
          detail::polygon_area_centroid(clipped.data(), m, area, c);
          if (area > Scalar(0)) total += area * h(c);
        }
      } else {
        const Vec2<Scalar> ctr =
            g.node(i, j) + Vec2<Scalar>(g.hx() / 2, g.hy() / 2);
        const Scalar vc = (v0 + v1 + v2 + v3) / 4;
        std::array<Vec2<Scalar>, 3> tp;
        std::array<Scalar, 3> tv;
        std::array<Vec2<Scalar>, 6> tc;
        for (int e = 0; e < 4; ++e) {
          tp = {pts[e], pts[(e + 1) % 4], ctr};
          tv = {vals[e], vals[(e + 1) % 4], vc};
          const int m = detail::clip_negative(tp, tv, tc);
          if (m >= 3) {
            Scalar area;
            Vec2<Scalar> c;
            detail::polygon_area_centroid(tc.data(), m, area, c);
            if (area > Scalar(0)) total += area * h(c);
          }
        }
      }
    }
  return total;
}

template <class Scalar>
Scalar volume_integral(const LevelSet<Scalar>& ls,
                       const ScalarField<Scalar>& h) {
  if (!h.grid.same_as(ls.grid))
    throw std::invalid_argument("volume_integral: grid mismatch");
  return volume_integral(ls,
                         [&](const Vec2<Scalar>& p) { return h.sample(p); });
}

template <class Scalar>
Scalar domain_area(const LevelSet<Scalar>& ls) {
  return volume_integral(ls, [](const Vec2<Scalar>&) { return Scalar(1); });
}

// Trapezoid quadrature of h over all extracted boundary loops.
template <class Scalar, class F,
          class = std::enable_if_t<std::is_invocable_v<F, Vec2<Scalar>>>>
Scalar boundary_integral(const BoundaryTrace<Scalar>& trace, F&& h) {
  Scalar total = 0;
  for (Index k = 0; k < trace.vertex_count(); ++k)
    total += trace.weights[k] * h(Vec2<Scalar>(trace.positions.col(k)));
  return total;
}

template <class Scalar, class F,
          class = std::enable_if_t<std::is_invocable_v<F, Vec2<Scalar>>>>
Scalar boundary_integral(const LevelSet<Scalar>& ls, F&& h) {
  return boundary_integral(extract_boundary(ls), std::forward<F>(h));
}

template <class Scalar>
Scalar boundary_integral(const LevelSet<Scalar>& ls,
                         const ScalarField<Scalar>& h) {
  if (!h.grid.same_as(ls.grid))
    throw std::invalid_argument("boundary_integral: grid mismatch");
  return boundary_integral(ls,
                           [&](const Vec2<Scalar>& p) { return h.sample(p); });
}

template <class Scalar>
Scalar perimeter(const LevelSet<Scalar>& ls) {
  return boundary_integral(ls, [](const Vec2<Scalar>&) { return Scalar(1); });
}

}  // namespace quadsurf
