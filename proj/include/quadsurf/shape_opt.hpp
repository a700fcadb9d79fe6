// Level-set gradient descent on the shape functionals. The boundary speed
// is the shape-derivative density of the functional being minimized:
//
//   second-order problem:  J = int(|grad u|^2 - 2 f u + g^2),
//                          dJ = int_bnd (g^2 - |grad u|^2) V.n,
//                          speed = |grad u|^2 - g^2;
//   fourth-order cascade:  J = int g - (1/2) int u^2  (optionally int g^2),
//                          dJ = int_bnd (g - |grad u||grad v|) V.n,
//                          speed = |grad u||grad v| - g.
//
// Each step extends the vertex speeds along normals into a narrow band,
// advects phi one upwind step with a backtracking line search on J, projects
// the iterate back onto "contains the source hull", and reinitializes on a
// fixed cadence. Stationary boundaries (speed = 0 at the prescribed datum)
// are fixed points by construction.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "quadsurf/gspec.hpp"
#include "quadsurf/integrate.hpp"
#include "quadsurf/poisson.hpp"

namespace quadsurf {

struct DescentParams {
  double cfl = 0.5;
  Index max_iters = 500;
  double tol_residual = 0.05;
  Index reinit_every = 5;
  Index backtrack_max = 8;
  // 1-2-1 filter passes applied to vertex speeds along each loop; keeps the
  // advected front from picking up grid-scale ripple (zero fields stay zero).
  Index velocity_smoothing = 8;
};

enum class SolveStatus { kConverged, kConstrainedAtHull, kMaxIters };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kConstrainedAtHull: return "constrained_at_hull";
    default: return "max_iters";
  }
}

template <class Scalar>
struct IterationRecord {
  Scalar J = 0;
  Scalar area = 0;
  Scalar perimeter = 0;
  Scalar residual_inf = 0;
  Scalar residual_l2 = 0;
  Scalar containment_violation = 0;  // area of C_f \ Omega at this iterate
  Index cg_iterations = 0;
  Scalar dt = 0;
  Index backtracks = 0;
};

template <class Scalar>
struct SolveReport {
  SolveStatus status = SolveStatus::kMaxIters;
  std::vector<IterationRecord<Scalar>> history;  // one entry per visited iterate
  LevelSet<Scalar> final_ls;
  BoundaryTrace<Scalar> final_trace;
  ArrayX<Scalar> final_grad_u;   // |grad u| per final trace vertex
  ArrayX<Scalar> final_grad_v;   // empty for the second-order problem
  ArrayX<Scalar> final_g;        // g sampled at the final trace vertices
  BoolArray final_flagged;
  Index flagged_vertices = 0;
  Index accepted_steps = 0;
  Scalar residual_inf = 0;
  std::string solver_error;      // nonempty when a mid-descent solve failed
};

// ---------------------------------------------------------------------------
// Functionals

// |grad u|^2 at interior nodes, centered differences on the ghost-extended
// field so the band next to the interface sees the true slope. Exterior
// nodes adjacent to the interface carry the value of their nearest interior
// neighbour, so cut-cell sampling does not average against zeros.
template <class Scalar>
ScalarField<Scalar> gradient_squared_field(const PoissonSolution<Scalar>& sol) {
  const Grid<Scalar>& g = sol.ls.grid;
  const ScalarField<Scalar> ext = ghost_extended(sol);
  ScalarField<Scalar> out(g);
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i)
      if (sol.ls.inside(i, j))
        out.at(i, j) = node_gradient(ext, i, j).squaredNorm();
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      if (sol.ls.inside(i, j)) continue;
      Scalar acc = 0;
      int cnt = 0;
      auto probe = [&](Index ni, Index nj) {
        if (ni < 0 || ni > g.nx || nj < 0 || nj > g.ny) return;
        if (!sol.ls.inside(ni, nj)) return;
        acc += out.at(ni, nj);
        ++cnt;
      };
      probe(i - 1, j);
      probe(i + 1, j);
      probe(i, j - 1);
      probe(i, j + 1);
      if (cnt > 0) out.at(i, j) = acc / Scalar(cnt);
    }
  return out;
}

template <class Scalar>
Scalar functional_qs_value(const PoissonSolution<Scalar>& sol,
                           const SourceSpec<Scalar>& f,
                           const GSpec<Scalar>& g) {
  const ScalarField<Scalar> grad2 = gradient_squared_field(sol);
  return volume_integral(sol.ls, [&](const Vec2<Scalar>& p) {
    const Scalar gv = g.eval(p);
    return grad2.sample(p) - 2 * f.eval(p) * sol.u.sample(p) + gv * gv;
  });
}

template <class Scalar>
Scalar functional_qs(const LevelSet<Scalar>& ls, const SourceSpec<Scalar>& f,
                     const GSpec<Scalar>& g) {
  return functional_qs_value(solve_poisson(ls, f), f, g);
}

template <class Scalar>
Scalar functional_bilap_value(const PoissonSolution<Scalar>& sol,
                              const GSpec<Scalar>& g, bool g_squared = false) {
  const Scalar g_term = volume_integral(sol.ls, [&](const Vec2<Scalar>& p) {
    const Scalar gv = g.eval(p);
    return g_squared ? gv * gv : gv;
  });
  const Scalar u2 = volume_integral(sol.ls, [&](const Vec2<Scalar>& p) {
    const Scalar uv = sol.u.sample(p);
    return uv * uv;
  });
  return g_term - u2 / 2;
}

template <class Scalar>
Scalar functional_bilap(const LevelSet<Scalar>& ls, const SourceSpec<Scalar>& f,
                        const GSpec<Scalar>& g, bool g_squared = false) {
  return functional_bilap_value(solve_poisson(ls, f), g, g_squared);
}

// ---------------------------------------------------------------------------
// Velocities

// speed = |grad u|^2 - g^2 (zero at flagged vertices).
template <class Scalar>
ArrayX<Scalar> shape_velocity_qs(const BoundaryGradient<Scalar>& bg,
                                 const GSpec<Scalar>& g) {
  const Index n = bg.magnitude.size();
  ArrayX<Scalar> speed = ArrayX<Scalar>::Zero(n);
  for (Index k = 0; k < n; ++k) {
    if (bg.flagged[k]) continue;
    const Scalar gv = g.eval(Vec2<Scalar>(bg.trace.positions.col(k)));
    speed[k] = bg.magnitude[k] * bg.magnitude[k] - gv * gv;
  }
  return speed;
}

// speed = |grad u||grad v| - g (zero where either sample is flagged).
template <class Scalar>
ArrayX<Scalar> shape_velocity_bilap(const BoundaryGradient<Scalar>& bg_u,
                                    const BoundaryGradient<Scalar>& bg_v,
                                    const GSpec<Scalar>& g) {
  const Index n = bg_u.magnitude.size();
  if (bg_v.magnitude.size() != n)
    throw std::invalid_argument("shape_velocity_bilap: trace mismatch");
  ArrayX<Scalar> speed = ArrayX<Scalar>::Zero(n);
  for (Index k = 0; k < n; ++k) {
    if (bg_u.flagged[k] || bg_v.flagged[k]) continue;
    const Scalar gv = g.eval(Vec2<Scalar>(bg_u.trace.positions.col(k)));
    speed[k] = bg_u.magnitude[k] * bg_v.magnitude[k] - gv;
  }
  return speed;
}

// 1-2-1 smoothing of per-vertex values along each loop (cyclic on closed
// loops, clamped at open ends).
template <class Scalar>
ArrayX<Scalar> smooth_along_loops(const BoundaryTrace<Scalar>& trace,
                                  ArrayX<Scalar> values, Index passes) {
  ArrayX<Scalar> next = values;
  for (Index pass = 0; pass < passes; ++pass) {
    for (const LoopSpan& loop : trace.loops) {
      const Index m = loop.count;
      for (Index k = 0; k < m; ++k) {
        Index prev = k - 1, nxt = k + 1;
        if (loop.closed) {
          prev = (k + m - 1) % m;
          nxt = (k + 1) % m;
        } else {
          prev = std::max<Index>(prev, 0);
          nxt = std::min<Index>(nxt, m - 1);
        }
        next[loop.begin + k] =
            (values[loop.begin + prev] + 2 * values[loop.begin + k] +
             values[loop.begin + nxt]) /
            4;
      }
    }
    values.swap(next);
  }
  return values;
}

// ---------------------------------------------------------------------------
// Advection

// Vertex speeds extended constant along normals (nearest-vertex lookup with
// a bucket grid) into a band of the given width; zero beyond.
template <class Scalar>
ScalarField<Scalar> extend_velocity(const LevelSet<Scalar>& ls,
                                    const BoundaryTrace<Scalar>& trace,
                                    const ArrayX<Scalar>& speeds,
                                    Scalar band_width) {
  const Grid<Scalar>& g = ls.grid;
  const Index nv = trace.vertex_count();
  if (speeds.size() != nv)
    throw std::invalid_argument("extend_velocity: speed count mismatch");

  const Scalar cell = 2 * g.hmax();
  Vec2<Scalar> lo = trace.positions.rowwise().minCoeff();
  Vec2<Scalar> hi = trace.positions.rowwise().maxCoeff();
  lo.array() -= cell;
  hi.array() += cell;
  const Index bx = std::max<Index>(
      1, Index(std::ceil((hi.x() - lo.x()) / cell)));
  const Index by = std::max<Index>(
      1, Index(std::ceil((hi.y() - lo.y()) / cell)));
  std::vector<std::vector<Index>> buckets(bx * by);
  auto bucket_of = [&](const Vec2<Scalar>& p, Index& ix, Index& iy) {
    ix = std::clamp<Index>(Index((p.x() - lo.x()) / cell), 0, bx - 1);
    iy = std::clamp<Index>(Index((p.y() - lo.y()) / cell), 0, by - 1);
  };
  for (Index k = 0; k < nv; ++k) {
    Index ix, iy;
    bucket_of(Vec2<Scalar>(trace.positions.col(k)), ix, iy);
    buckets[iy * bx + ix].push_back(k);
  }

  auto nearest_speed = [&](const Vec2<Scalar>& p) -> Scalar {
    Index ix, iy;
    bucket_of(p, ix, iy);
    Scalar best = std::numeric_limits<Scalar>::max();
    Scalar value = 0;
    bool found = false;
    for (Index ring = 0; ring < std::max(bx, by) + 1; ++ring) {
      for (Index dy = -ring; dy <= ring; ++dy)
        for (Index dx = -ring; dx <= ring; ++dx) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          const Index cx = ix + dx, cy = iy + dy;
          if (cx < 0 || cx >= bx || cy < 0 || cy >= by) continue;
          for (Index k : buckets[cy * bx + cx]) {
            const Scalar d =
                (Vec2<Scalar>(trace.positions.col(k)) - p).squaredNorm();
            if (d < best) {
              best = d;
              value = speeds[k];
            }
          }
        }
      // One extra ring after the first hit guards against diagonal cases.
      if (found) break;
      if (best < std::numeric_limits<Scalar>::max()) found = true;
    }
    return value;
  };

  ScalarField<Scalar> out(g);
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i)
      if (std::abs(ls.at(i, j)) <= band_width)
        out.at(i, j) = nearest_speed(g.node(i, j));
  return out;
}

namespace detail {

template <class Scalar>
Scalar minmod(Scalar a, Scalar b) {
  if (a * b <= 0) return Scalar(0);
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace detail

// One explicit Godunov upwind step of phi_t + F |grad phi| = 0 with
// second-order minmod-limited one-sided differences. First-order upwinding
// leaves a direction-dependent O(h) drift that prints grid-symmetric ripple
// onto circular fronts; the limited correction removes it.
template <class Scalar>
LevelSet<Scalar> advect_upwind(const LevelSet<Scalar>& ls,
                               const ScalarField<Scalar>& speed, Scalar dt) {
  const Grid<Scalar>& g = ls.grid;
  LevelSet<Scalar> out = ls;

  auto value = [&](Index i, Index j) {
    i = std::clamp<Index>(i, 0, g.nx);
    j = std::clamp<Index>(j, 0, g.ny);
    return ls.at(i, j);
  };

  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      const Scalar F = speed.at(i, j);
      if (F == Scalar(0)) continue;
      const Scalar c = ls.at(i, j);
      const Scalar hx = g.hx(), hy = g.hy();

      const Scalar d2x_m =
          (value(i + 1, j) - 2 * c + value(i - 1, j)) / (hx * hx);
      const Scalar d2x_mm =
          (c - 2 * value(i - 1, j) + value(i - 2, j)) / (hx * hx);
      const Scalar d2x_pp =
          (value(i + 2, j) - 2 * value(i + 1, j) + c) / (hx * hx);
      const Scalar dxm = (c - value(i - 1, j)) / hx +
                         (hx / 2) * detail::minmod(d2x_mm, d2x_m);
      const Scalar dxp = (value(i + 1, j) - c) / hx -
                         (hx / 2) * detail::minmod(d2x_m, d2x_pp);

      const Scalar d2y_m =
          (value(i, j + 1) - 2 * c + value(i, j - 1)) / (hy * hy);
      const Scalar d2y_mm =
          (c - 2 * value(i, j - 1) + value(i, j - 2)) / (hy * hy);
      const Scalar d2y_pp =
          (value(i, j + 2) - 2 * value(i, j + 1) + c) / (hy * hy);
      const Scalar dym = (c - value(i, j - 1)) / hy +
                         (hy / 2) * detail::minmod(d2y_mm, d2y_m);
      const Scalar dyp = (value(i, j + 1) - c) / hy -
                         (hy / 2) * detail::minmod(d2y_m, d2y_pp);

      Scalar gx2, gy2;
      if (F > 0) {  // front moves outward: upwind like sign(phi0) < 0 eikonal
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
      out.at(i, j) = c - dt * F * std::sqrt(gx2 + gy2);
    }
  return out;
}

// Extend per-vertex speeds and take one upwind step; dt <= 0 picks the CFL
// step cfl * h / max|speed|. Zero speeds return the input unchanged.
template <class Scalar>
LevelSet<Scalar> extend_and_advect(const LevelSet<Scalar>& ls,
                                   const BoundaryTrace<Scalar>& trace,
                                   const ArrayX<Scalar>& speeds,
                                   const DescentParams& params,
                                   Scalar dt = Scalar(-1)) {
  const Scalar max_speed = speeds.abs().maxCoeff();
  if (max_speed == Scalar(0)) return ls;
  if (dt <= Scalar(0)) dt = Scalar(params.cfl) * ls.grid.hmin() / max_speed;
  const ScalarField<Scalar> field =
      extend_velocity(ls, trace, speeds, Scalar(6) * ls.grid.hmax());
  return advect_upwind(ls, field, dt);
}

// Pointwise union with the source hull: keeps "Omega contains C_f" exact at
// the nodes.
template <class Scalar>
LevelSet<Scalar> project_containment(const LevelSet<Scalar>& ls,
                                     const LevelSet<Scalar>& hull_ls) {
  return level_set_union(ls, hull_ls);
}

// Area of C_f \ Omega; exactly zero at nodes right after projection.
template <class Scalar>
Scalar containment_violation_area(const LevelSet<Scalar>& ls,
                                  const LevelSet<Scalar>& hull_ls) {
  LevelSet<Scalar> diff = hull_ls;
  diff.phi = hull_ls.phi.max(-ls.phi);
  if (!(diff.phi < 0).any()) return Scalar(0);
  return domain_area(diff);
}

// ---------------------------------------------------------------------------
// Descent driver

// Called with every visited iterate's boundary (snapshots, live plots).
template <class Scalar>
using TraceObserver = std::function<void(Index, const BoundaryTrace<Scalar>&)>;

namespace detail {

template <class Scalar>
struct DescentState {
  std::vector<PoissonSolution<Scalar>> levels;
  Scalar J = 0;
};

template <class Scalar>
SolveReport<Scalar> descend(LevelSet<Scalar> ls, const SourceSpec<Scalar>& f,
                            const GSpec<Scalar>& g, const DescentParams& params,
                            bool bilap, bool g_squared,
                            const TraceObserver<Scalar>& observer = {}) {
  const Grid<Scalar>& grid = ls.grid;
  const Scalar h = grid.hmax();
  const Index depth = bilap ? 2 : 1;
  const LevelSet<Scalar> hull_ls = signed_distance(f.hull, grid);

  ls = project_containment(ls, hull_ls);
  ls = reinitialize(ls);

  SolveReport<Scalar> report;
  auto evaluate = [&](const LevelSet<Scalar>& dom,
                      const std::vector<PoissonSolution<Scalar>>* warm)
      -> DescentState<Scalar> {
    CascadeOptions<Scalar> copts;
    copts.warm = warm;
    DescentState<Scalar> st;
    st.levels = solve_cascade(dom, f, depth, copts);
    st.J = bilap ? functional_bilap_value(st.levels.back(), g, g_squared)
                 : functional_qs_value(st.levels[0], f, g);
    return st;
  };

  DescentState<Scalar> state;
  try {
    state = evaluate(ls, nullptr);
  } catch (const SolverError& err) {
    report.solver_error = err.what();
    report.final_ls = ls;
    return report;
  }

  for (Index iter = 0;; ++iter) {
    const BoundaryTrace<Scalar> trace = extract_boundary(ls);
    if (observer) observer(iter, trace);
    BoundaryGradient<Scalar> bg_u = boundary_gradient(state.levels[0], trace);
    BoundaryGradient<Scalar> bg_v;
    if (bilap) bg_v = boundary_gradient(state.levels[1], trace);

    // Residuals on free vertices (farther than 2h from the hull boundary).
    Scalar res_inf = 0, res_l2 = 0, wsum = 0;
    Index free_count = 0;
    const Index nvert = trace.vertex_count();
    ArrayX<Scalar> g_samples(nvert);
    for (Index k = 0; k < nvert; ++k) {
      const Vec2<Scalar> p = trace.positions.col(k);
      g_samples[k] = g.eval(p);
      const bool flagged = bg_u.flagged[k] || (bilap && bg_v.flagged[k]);
      if (flagged) continue;
      if (std::abs(hull_ls.sample(p)) <= 2 * h) continue;
      const Scalar datum = bilap ? bg_u.magnitude[k] * bg_v.magnitude[k]
                                 : bg_u.magnitude[k];
      const Scalar rel = std::abs(datum - g_samples[k]) / g_samples[k];
      res_inf = std::max(res_inf, rel);
      res_l2 += trace.weights[k] * rel * rel;
      wsum += trace.weights[k];
      ++free_count;
    }
    res_l2 = wsum > 0 ? std::sqrt(res_l2 / wsum) : Scalar(0);

    IterationRecord<Scalar> rec;
    rec.J = state.J;
    rec.area = domain_area(ls);
    rec.perimeter = trace.total_length();
    rec.residual_inf = res_inf;
    rec.residual_l2 = res_l2;
    rec.containment_violation = containment_violation_area(ls, hull_ls);
    rec.cg_iterations = state.levels[0].iterations;
    report.history.push_back(rec);

    // Terminal bookkeeping shared by every exit path.
    auto finalize = [&](SolveStatus status) {
      report.status = status;
      report.final_ls = ls;
      report.final_trace = trace;
      report.final_grad_u = bg_u.magnitude;
      if (bilap) report.final_grad_v = bg_v.magnitude;
      report.final_g = g_samples;
      report.final_flagged = bg_u.flagged;
      if (bilap)
        report.final_flagged = report.final_flagged || bg_v.flagged;
      report.flagged_vertices =
          Index(report.final_flagged.template cast<int>().sum());
      report.residual_inf = res_inf;
    };

    // Boundary sitting on the hull everywhere: the constrained stop.
    Scalar far_from_hull = 0;
    for (Index k = 0; k < nvert; ++k)
      far_from_hull = std::max(
          far_from_hull,
          std::abs(hull_ls.sample(Vec2<Scalar>(trace.positions.col(k)))));
    if (far_from_hull <= h || free_count == 0) {
      finalize(SolveStatus::kConstrainedAtHull);
      return report;
    }
    if (res_inf <= Scalar(params.tol_residual)) {
      finalize(SolveStatus::kConverged);
      return report;
    }
    if (iter >= params.max_iters) {
      finalize(SolveStatus::kMaxIters);
      return report;
    }

    // Descent step with a backtracking line search on J.
    ArrayX<Scalar> speeds = bilap ? shape_velocity_bilap(bg_u, bg_v, g)
                                  : shape_velocity_qs(bg_u, g);
    speeds = smooth_along_loops(trace, std::move(speeds),
                                params.velocity_smoothing);
    const Scalar max_speed = speeds.abs().maxCoeff();
    if (max_speed == Scalar(0)) {  // every vertex flagged or stationary
      finalize(SolveStatus::kMaxIters);
      return report;
    }

    const ScalarField<Scalar> speed_field =
        extend_velocity(ls, trace, speeds, Scalar(6) * h);
    // Flooring the CFL denominator at the datum scale makes late-stage
    // displacements proportional to the defect; sizing dt purely by the
    // worst vertex would move every residual bump a full half-cell and keep
    // it oscillating instead of decaying.
    Scalar speed_scale = 0;
    for (Index k = 0; k < nvert; ++k)
      speed_scale = std::max(
          speed_scale, bilap ? g_samples[k] : g_samples[k] * g_samples[k]);
    const Scalar dt0 =
        Scalar(params.cfl) * grid.hmin() / std::max(max_speed, speed_scale);
    const bool reinit_now = ((iter + 1) % params.reinit_every) == 0;

    bool accepted = false;
    try {
      for (Index b = 0; b <= params.backtrack_max; ++b) {
        const Scalar dt = dt0 / Scalar(Index(1) << b);
        LevelSet<Scalar> trial = advect_upwind(ls, speed_field, dt);
        trial = project_containment(trial, hull_ls);
        if (reinit_now) trial = reinitialize(trial);
        DescentState<Scalar> trial_state = evaluate(trial, &state.levels);
        if (trial_state.J <=
            state.J + Scalar(1e-12) * std::abs(state.J)) {
          ls = std::move(trial);
          state = std::move(trial_state);
          report.history.back().dt = dt;
          report.history.back().backtracks = b;
          ++report.accepted_steps;
          accepted = true;
          break;
        }
      }
    } catch (const SolverError& err) {
      report.solver_error = err.what();
      finalize(SolveStatus::kMaxIters);
      return report;
    }
    if (!accepted) {  // line search exhausted: no descent direction left
      finalize(SolveStatus::kMaxIters);
      return report;
    }
  }
}

}  // namespace detail

// Descent for the second-order overdetermined problem.
template <class Scalar>
SolveReport<Scalar> solve_qs(const SourceSpec<Scalar>& f, const GSpec<Scalar>& g,
                             const LevelSet<Scalar>& init,
                             const DescentParams& params = {},
                             const TraceObserver<Scalar>& observer = {}) {
  return detail::descend(init, f, g, params, /*bilap=*/false, false, observer);
}

// Descent for the fourth-order cascade problem.
template <class Scalar>
SolveReport<Scalar> solve_bilap(const SourceSpec<Scalar>& f,
                                const GSpec<Scalar>& g,
                                const LevelSet<Scalar>& init,
                                const DescentParams& params = {},
                                bool g_squared = false,
                                const TraceObserver<Scalar>& observer = {}) {
  return detail::descend(init, f, g, params, /*bilap=*/true, g_squared,
                         observer);
}

// Default initial guess: the source hull dilated by a few cells.
template <class Scalar>
LevelSet<Scalar> hull_margin_init(const SourceSpec<Scalar>& f,
                                  const Grid<Scalar>& grid,
                                  Scalar margin_cells = Scalar(4)) {
  LevelSet<Scalar> ls = signed_distance(f.hull, grid);
  ls.phi -= margin_cells * grid.hmax();
  return ls;
}

}  // namespace quadsurf
