// One-dimensional radial reference solutions for disk data: cumulative
// quadrature of u'(r) = -(1/r) int_0^r s f(s) ds and the cascade obtained by
// feeding u back in as the source. These profiles are the reference the 2-D
// solver and certificates are validated against, so the quadrature error is
// kept far below the grid error: 4096 samples, a quadratic end-corrected
// per-step rule, and the source radius is a sample breakpoint so the f jump
// costs nothing.
#pragma once

#include <utility>

#include "quadsurf/core.hpp"

namespace quadsurf {

namespace detail {

// Cumulative integral of uniformly sampled data; each step integrates the
// quadratic through the three nearest samples.
template <class Scalar>
ArrayX<Scalar> cumulative_integral(const ArrayX<Scalar>& q, Scalar h,
                                   Scalar offset) {
  const Index n = q.size();
  ArrayX<Scalar> out(n);
  out[0] = offset;
  if (n == 2) {
    out[1] = offset + h * (q[0] + q[1]) / 2;
    return out;
  }
  out[1] = offset + h * (5 * q[0] + 8 * q[1] - q[2]) / 12;
  for (Index k = 1; k + 1 < n; ++k)
    out[k + 1] = out[k] + h * (-q[k - 1] + 8 * q[k] + 5 * q[k + 1]) / 12;
  return out;
}

}  // namespace detail

constexpr Index kRadialSamples = 4096;

template <class Scalar>
struct RadialProfile {
  ArrayX<Scalar> r;   // sample radii, 0 to R; two uniform segments split at a
  ArrayX<Scalar> u;   // u(r), u(R) = 0
  ArrayX<Scalar> du;  // u'(r), du(0) = 0
  Scalar c = 0, a = 0, R = 0;
  Index split = 0;    // node index of r = a (0 when a >= R: single segment)
  Scalar h1 = 0, h2 = 0;

  Scalar u0() const { return u[0]; }
  Scalar du_R() const { return du[du.size() - 1]; }

  // Cumulative integral of node samples over this profile's grid.
  ArrayX<Scalar> cumulative(const ArrayX<Scalar>& q) const {
    if (split == 0) return detail::cumulative_integral(q, h1, Scalar(0));
    const ArrayX<Scalar> left = detail::cumulative_integral(
        ArrayX<Scalar>(q.head(split + 1)), h1, Scalar(0));
    const ArrayX<Scalar> right = detail::cumulative_integral(
        ArrayX<Scalar>(q.tail(q.size() - split)), h2, left[split]);
    ArrayX<Scalar> out(q.size());
    out.head(split + 1) = left;
    out.tail(q.size() - split - 1) = right.tail(right.size() - 1);
    return out;
  }

  Scalar interp(const ArrayX<Scalar>& f, Scalar x) const {
    const Index n = r.size();
    if (x <= r[0]) return f[0];
    if (x >= r[n - 1]) return f[n - 1];
    Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Index mid = (lo + hi) / 2;
      (r[mid] <= x ? lo : hi) = mid;
    }
    const Scalar t = (x - r[lo]) / (r[lo + 1] - r[lo]);
    return (1 - t) * f[lo] + t * f[lo + 1];
  }
  Scalar u_at(Scalar x) const { return interp(u, x); }
  Scalar du_at(Scalar x) const { return interp(du, x); }
};

namespace detail {

template <class Scalar>
RadialProfile<Scalar> radial_grid(Scalar a, Scalar R, Index m) {
  RadialProfile<Scalar> p;
  p.a = std::min(a, R);
  p.R = R;
  if (a > 0 && a < R) {
    const Index m1 = std::max<Index>(
        64, static_cast<Index>(std::round(double(m) * double(a / R))));
    const Index m2 = std::max<Index>(64, m - m1);
    p.r.resize(m1 + m2 + 1);
    p.h1 = a / Scalar(m1);
    p.h2 = (R - a) / Scalar(m2);
    for (Index k = 0; k <= m1; ++k) p.r[k] = Scalar(k) * p.h1;
    for (Index k = 1; k <= m2; ++k) p.r[m1 + k] = a + Scalar(k) * p.h2;
    p.split = m1;
  } else {
    p.r.resize(m + 1);
    p.h1 = p.h2 = R / Scalar(m);
    for (Index k = 0; k <= m; ++k) p.r[k] = Scalar(k) * p.h1;
    p.split = 0;
  }
  return p;
}

// Fill u and du of a prepared profile from F(r) = int_0^r s f(s) ds.
template <class Scalar>
void radial_solve_from_F(RadialProfile<Scalar>& p, const ArrayX<Scalar>& F) {
  const Index n = p.r.size();
  p.du.resize(n);
  p.du[0] = 0;
  for (Index k = 1; k < n; ++k) p.du[k] = -F[k] / p.r[k];
  const ArrayX<Scalar> C = p.cumulative(ArrayX<Scalar>(-p.du));
  p.u = C[n - 1] - C;
}

}  // namespace detail

// Solve -(1/r)(r u')' = f on [0,R], u(R) = 0, for f = c on [0,a], 0 beyond.
template <class Scalar>
RadialProfile<Scalar> radial_poisson(Scalar c, Scalar a, Scalar R,
                                     Index m = kRadialSamples) {
  if (!(a > 0) || !(R > 0))
    throw std::invalid_argument("radial_poisson: need a, R > 0");
  RadialProfile<Scalar> p = detail::radial_grid(a, R, m);
  p.c = c;
  const Index n = p.r.size();
  ArrayX<Scalar> F(n);
  if (p.split == 0) {
    F = detail::cumulative_integral(ArrayX<Scalar>(p.r * c), p.h1, Scalar(0));
  } else {
    // No source mass past the split node: F stays constant there.
    const ArrayX<Scalar> left = detail::cumulative_integral(
        ArrayX<Scalar>(p.r.head(p.split + 1) * c), p.h1, Scalar(0));
    F.head(p.split + 1) = left;
    F.tail(n - p.split - 1).setConstant(left[p.split]);
  }
  detail::radial_solve_from_F(p, F);
  return p;
}

// Next cascade level: same grid, previous u as the source (continuous, so
// the plain composite cumulative applies).
template <class Scalar>
RadialProfile<Scalar> radial_next_level(const RadialProfile<Scalar>& prev) {
  RadialProfile<Scalar> p = prev;  // reuse grid metadata
  detail::radial_solve_from_F(p, prev.cumulative(ArrayX<Scalar>(prev.r * prev.u)));
  return p;
}

// (u, v) pair of the depth-2 cascade.
template <class Scalar>
std::pair<RadialProfile<Scalar>, RadialProfile<Scalar>> radial_cascade(
    Scalar c, Scalar a, Scalar R) {
  RadialProfile<Scalar> u = radial_poisson(c, a, R);
  RadialProfile<Scalar> v = radial_next_level(u);
  return {std::move(u), std::move(v)};
}

template <class Scalar>
struct QsRadiusResult {
  Scalar R;
  bool valid;  // false when the balanced ball would not contain the source
};

// Flux balance for constant g = k: c * pi a^2 = k * 2 pi R.
template <class Scalar>
QsRadiusResult<Scalar> radial_qs_radius(Scalar c, Scalar a, Scalar k) {
  if (!(c > 0) || !(a > 0) || !(k > 0))
    throw std::invalid_argument("radial_qs_radius: need c, a, k > 0");
  const Scalar R = c * a * a / (2 * k);
  return {R, R > a};
}

// Boundary datum g* = |u'(R) v'(R)| of the radial depth-2 cascade.
template <class Scalar>
Scalar radial_bilap_g(Scalar c, Scalar a, Scalar R) {
  auto [u, v] = radial_cascade(c, a, R);
  return std::abs(u.du_R() * v.du_R());
}

}  // namespace quadsurf
