// Geometric primitives (disks, convex polygons, unions), exact signed
// distances to them, convex hulls, and the piecewise-constant source term
// built from them.
#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include "quadsurf/core.hpp"

namespace quadsurf {

template <class Scalar>
struct Disk {
  Vec2<Scalar> center;
  Scalar radius;
};

// Counterclockwise vertex list, no three consecutive vertices collinear.
template <class Scalar>
struct ConvexPolygon {
  std::vector<Vec2<Scalar>> vertices;

  Scalar area() const {
    Scalar a = 0;
    const Index n = Index(vertices.size());
    for (Index k = 0; k < n; ++k) {
      const auto& p = vertices[k];
      const auto& q = vertices[(k + 1) % n];
      a += p.x() * q.y() - q.x() * p.y();
    }
    return a / 2;
  }

  Scalar perimeter() const {
    Scalar l = 0;
    const Index n = Index(vertices.size());
    for (Index k = 0; k < n; ++k)
      l += (vertices[(k + 1) % n] - vertices[k]).norm();
    return l;
  }

  Vec2<Scalar> centroid() const {
    Vec2<Scalar> c = Vec2<Scalar>::Zero();
    Scalar a = 0;
    const Index n = Index(vertices.size());
    for (Index k = 0; k < n; ++k) {
      const auto& p = vertices[k];
      const auto& q = vertices[(k + 1) % n];
      const Scalar w = p.x() * q.y() - q.x() * p.y();
      c += w * (p + q);
      a += w;
    }
    return c / (3 * a);
  }

  bool contains(const Vec2<Scalar>& p) const {
    const Index n = Index(vertices.size());
    for (Index k = 0; k < n; ++k) {
      const Vec2<Scalar> e = vertices[(k + 1) % n] - vertices[k];
      const Vec2<Scalar> d = p - vertices[k];
      if (e.x() * d.y() - e.y() * d.x() < 0) return false;
    }
    return true;
  }
};

template <class Scalar>
using Shape = std::variant<Disk<Scalar>, ConvexPolygon<Scalar>>;

template <class Scalar>
Scalar signed_distance_to(const Disk<Scalar>& d, const Vec2<Scalar>& p) {
  return (p - d.center).norm() - d.radius;
}

template <class Scalar>
Scalar distance_to_segment(const Vec2<Scalar>& a, const Vec2<Scalar>& b,
                           const Vec2<Scalar>& p) {
  const Vec2<Scalar> ab = b - a;
  const Scalar t =
      std::clamp<Scalar>((p - a).dot(ab) / ab.squaredNorm(), 0, 1);
  return (p - (a + t * ab)).norm();
}

template <class Scalar>
Scalar signed_distance_to(const ConvexPolygon<Scalar>& poly,
                          const Vec2<Scalar>& p) {
  Scalar dist = std::numeric_limits<Scalar>::max();
  const Index n = Index(poly.vertices.size());
  for (Index k = 0; k < n; ++k)
    dist = std::min(dist, distance_to_segment(poly.vertices[k],
                                              poly.vertices[(k + 1) % n], p));
  return poly.contains(p) ? -dist : dist;
}

template <class Scalar>
Scalar signed_distance_to(const Shape<Scalar>& s, const Vec2<Scalar>& p) {
  return std::visit([&](const auto& prim) { return signed_distance_to(prim, p); },
                    s);
}

// Union of primitives: min over the exact member distances.
template <class Scalar>
Scalar signed_distance_to(const std::vector<Shape<Scalar>>& shapes,
                          const Vec2<Scalar>& p) {
  Scalar d = std::numeric_limits<Scalar>::max();
  for (const auto& s : shapes) d = std::min(d, signed_distance_to(s, p));
  return d;
}

template <class Scalar>
void bounding_box_of(const Shape<Scalar>& s, Vec2<Scalar>& lo,
                     Vec2<Scalar>& hi) {
  if (const auto* d = std::get_if<Disk<Scalar>>(&s)) {
    lo = d->center.array() - d->radius;
    hi = d->center.array() + d->radius;
  } else {
    const auto& poly = std::get<ConvexPolygon<Scalar>>(s);
    lo = Vec2<Scalar>::Constant(std::numeric_limits<Scalar>::max());
    hi = Vec2<Scalar>::Constant(std::numeric_limits<Scalar>::lowest());
    for (const auto& v : poly.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
}

// Andrew monotone chain. Counterclockwise output, collinear points dropped.
template <class Scalar>
ConvexPolygon<Scalar> convex_hull(std::vector<Vec2<Scalar>> pts) {
  if (pts.size() < 3)
    throw std::invalid_argument("convex_hull: need at least 3 points");
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());

  auto cross = [](const Vec2<Scalar>& o, const Vec2<Scalar>& a,
                  const Vec2<Scalar>& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) -
           (a.y() - o.y()) * (b.x() - o.x());
  };

  const size_t n = pts.size();
  std::vector<Vec2<Scalar>> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() < 3)
    throw std::invalid_argument("convex_hull: degenerate (collinear) input");
  return ConvexPolygon<Scalar>{std::move(h)};
}

template <class Scalar>
struct SourcePiece {
  Shape<Scalar> shape;
  Scalar value;  // > 0
};

// Piecewise-constant source f and the convex hull of its support. Disk
// pieces enter the hull through a dense boundary sampling; the polygonal
// hull area is then short of the true disk area by O(1/M^2).
template <class Scalar>
struct SourceSpec {
  static constexpr int kDiskHullSamples = 512;

  std::vector<SourcePiece<Scalar>> pieces;
  ConvexPolygon<Scalar> hull;

  explicit SourceSpec(std::vector<SourcePiece<Scalar>> pieces_)
      : pieces(std::move(pieces_)) {
    if (pieces.empty())
      throw std::invalid_argument("SourceSpec: no pieces");
    std::vector<Vec2<Scalar>> samples;
    for (const auto& piece : pieces) {
      if (!(piece.value > 0))
        throw std::invalid_argument("SourceSpec: piece values must be > 0");
      if (const auto* d = std::get_if<Disk<Scalar>>(&piece.shape)) {
        if (!(d->radius > 0))
          throw std::invalid_argument("SourceSpec: disk radius must be > 0");
        for (int k = 0; k < kDiskHullSamples; ++k) {
          const Scalar t = Scalar(2) * Scalar(EIGEN_PI) * Scalar(k) /
                           Scalar(kDiskHullSamples);
          samples.push_back(d->center + d->radius *
                                            Vec2<Scalar>(std::cos(t), std::sin(t)));
        }
      } else {
        const auto& poly = std::get<ConvexPolygon<Scalar>>(piece.shape);
        samples.insert(samples.end(), poly.vertices.begin(),
                       poly.vertices.end());
      }
    }
    hull = convex_hull(std::move(samples));
  }

  // Exact point membership; overlapping pieces add up.
  Scalar eval(const Vec2<Scalar>& p) const {
    Scalar v = 0;
    for (const auto& piece : pieces) {
      const bool in = std::visit(
          [&](const auto& s) { return signed_distance_to(s, p) <= Scalar(0); },
          piece.shape);
      if (in) v += piece.value;
    }
    return v;
  }

  // Sum of value * analytic piece area (pieces are inside the hull by
  // construction, so no clipping is involved).
  Scalar total_mass() const {
    Scalar m = 0;
    for (const auto& piece : pieces) {
      const Scalar a = std::visit(
          [](const auto& s) -> Scalar {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk<Scalar>>)
              return Scalar(EIGEN_PI) * s.radius * s.radius;
            else
              return s.area();
          },
          piece.shape);
      m += piece.value * a;
    }
    return m;
  }
};

}  // namespace quadsurf
