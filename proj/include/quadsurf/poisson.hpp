// Embedded-boundary Dirichlet solves on {phi < 0}: 5-point Laplacian with
// ghost-node linear interpolation at cut edges. The cut edge only adds to
// the diagonal, so the matrix stays a symmetric M-matrix and the discrete
// maximum principle is testable. Linear systems go through conjugate
// gradients with a Jacobi preconditioner at 1e-10 relative residual.
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <vector>

#include "quadsurf/boundary.hpp"
#include "quadsurf/level_set.hpp"
#include "quadsurf/shapes.hpp"

namespace quadsurf {

template <class Scalar>
struct PoissonSolution {
  ScalarField<Scalar> u;  // zero at nodes outside the domain
  LevelSet<Scalar> ls;
  Index iterations = 0;
  Scalar linear_residual = 0;
};

template <class Scalar>
struct PoissonOptions {
  Scalar tol = Scalar(1e-10);
  Index max_iterations = 0;  // 0: default 20 (nx + ny)
  const ScalarField<Scalar>* guess = nullptr;
};

// Discrete negative Laplacian on interior nodes with u = 0 at the phi = 0
// crossing of every cut edge (linear ghost value).
template <class Scalar>
struct DirichletOperator {
  static constexpr Scalar kThetaMin = Scalar(1e-3);

  Grid<Scalar> grid;
  std::vector<Index> node_of;          // unknown -> flat node index
  std::vector<Index> unknown_of;       // flat node index -> unknown or -1
  Eigen::SparseMatrix<Scalar> matrix;

  explicit DirichletOperator(const LevelSet<Scalar>& ls) : grid(ls.grid) {
    const Grid<Scalar>& g = grid;
    unknown_of.assign(g.node_count(), -1);
    for (Index j = 0; j <= g.ny; ++j)
      for (Index i = 0; i <= g.nx; ++i)
        if (ls.inside(i, j)) {
          unknown_of[g.idx(i, j)] = Index(node_of.size());
          node_of.push_back(g.idx(i, j));
        }
    if (node_of.empty())
      throw std::invalid_argument("DirichletOperator: empty domain");

    const Scalar ihx2 = 1 / (g.hx() * g.hx());
    const Scalar ihy2 = 1 / (g.hy() * g.hy());
    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(node_of.size() * 5);

    for (Index row = 0; row < Index(node_of.size()); ++row) {
      const Index node = node_of[row];
      const Index i = node % (g.nx + 1), j = node / (g.nx + 1);
      const Scalar phi_c = ls.phi[node];
      Scalar diag = 0;

      auto couple = [&](Index ni, Index nj, Scalar w) {
        if (ni < 0 || ni > g.nx || nj < 0 || nj > g.ny) {
          diag += w;  // box edge acts as a Dirichlet wall one cell away
          return;
        }
        const Index nnode = g.idx(ni, nj);
        const Index col = unknown_of[nnode];
        if (col >= 0) {
          diag += w;
          trip.emplace_back(row, col, -w);
        } else {
          const Scalar theta = std::max(
              phi_c / (phi_c - ls.phi[nnode]), kThetaMin);
          diag += w / theta;
        }
      };
      couple(i - 1, j, ihx2);
      couple(i + 1, j, ihx2);
      couple(i, j - 1, ihy2);
      couple(i, j + 1, ihy2);
      trip.emplace_back(row, row, diag);
    }
    matrix.resize(Index(node_of.size()), Index(node_of.size()));
    matrix.setFromTriplets(trip.begin(), trip.end());
  }

  Index size() const { return Index(node_of.size()); }

  // Scatter an unknown vector into a full grid field (zero outside).
  ScalarField<Scalar> scatter(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x)
      const {
    ScalarField<Scalar> f(grid);
    for (Index k = 0; k < size(); ++k) f.values[node_of[k]] = x[k];
    return f;
  }
};

namespace detail {

template <class Scalar>
PoissonSolution<Scalar> solve_with_operator(
    const DirichletOperator<Scalar>& op, const LevelSet<Scalar>& ls,
    const ArrayX<Scalar>& f_nodes, const PoissonOptions<Scalar>& opts) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vec b(op.size());
  for (Index k = 0; k < op.size(); ++k) b[k] = f_nodes[op.node_of[k]];

  PoissonSolution<Scalar> sol;
  sol.ls = ls;
  const Scalar bnorm = b.norm();
  if (bnorm == Scalar(0)) {  // unique solution of the homogeneous problem
    sol.u = ScalarField<Scalar>(ls.grid);
    return sol;
  }

  Eigen::ConjugateGradient<Eigen::SparseMatrix<Scalar>,
                           Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<Scalar>>
      cg;
  cg.setTolerance(opts.tol);
  const Index max_it = opts.max_iterations > 0
                           ? opts.max_iterations
                           : 20 * (ls.grid.nx + ls.grid.ny);
  cg.setMaxIterations(max_it);
  cg.compute(op.matrix);

  Vec x;
  if (opts.guess != nullptr) {
    Vec x0(op.size());
    for (Index k = 0; k < op.size(); ++k)
      x0[k] = opts.guess->values[op.node_of[k]];
    x = cg.solveWithGuess(b, x0);
  } else {
    x = cg.solve(b);
  }

  const Scalar residual = (op.matrix * x - b).norm() / bnorm;
  if (residual > opts.tol * Scalar(10))
    throw SolverError("solve_poisson: conjugate gradients stalled",
                      double(residual));

  sol.u = op.scatter(x);
  sol.iterations = cg.iterations();
  sol.linear_residual = residual;
  return sol;
}

}  // namespace detail

template <class Scalar, class F,
          class = std::enable_if_t<std::is_invocable_v<F, Vec2<Scalar>>>>
PoissonSolution<Scalar> solve_poisson(const LevelSet<Scalar>& ls, F&& f,
                                      const PoissonOptions<Scalar>& opts = {}) {
  const DirichletOperator<Scalar> op(ls);
  ArrayX<Scalar> fn(ls.grid.node_count());
  for (Index j = 0; j <= ls.grid.ny; ++j)
    for (Index i = 0; i <= ls.grid.nx; ++i)
      fn[ls.grid.idx(i, j)] = f(ls.grid.node(i, j));
  return detail::solve_with_operator(op, ls, fn, opts);
}

template <class Scalar>
PoissonSolution<Scalar> solve_poisson(const LevelSet<Scalar>& ls,
                                      const SourceSpec<Scalar>& f,
                                      const PoissonOptions<Scalar>& opts = {}) {
  return solve_poisson(
      ls, [&](const Vec2<Scalar>& p) { return f.eval(p); }, opts);
}

template <class Scalar>
PoissonSolution<Scalar> solve_poisson(const LevelSet<Scalar>& ls,
                                      const ScalarField<Scalar>& f,
                                      const PoissonOptions<Scalar>& opts = {}) {
  if (!f.grid.same_as(ls.grid))
    throw std::invalid_argument("solve_poisson: grid mismatch");
  const DirichletOperator<Scalar> op(ls);
  return detail::solve_with_operator(op, ls, f.values, opts);
}

template <class Scalar>
struct CascadeOptions {
  Scalar tol = Scalar(1e-10);
  Index max_iterations = 0;
  const std::vector<PoissonSolution<Scalar>>* warm = nullptr;
};

// u_0 solves with the given source, u_k with u_{k-1}; depth 2 gives the
// (u, v) pair of the fourth-order problem. One operator serves all levels.
template <class Scalar, class Source>
std::vector<PoissonSolution<Scalar>> solve_cascade(
    const LevelSet<Scalar>& ls, const Source& f, Index depth,
    const CascadeOptions<Scalar>& copts = {}) {
  if (depth < 1) throw std::invalid_argument("solve_cascade: depth >= 1");
  const DirichletOperator<Scalar> op(ls);

  ArrayX<Scalar> fn(ls.grid.node_count());
  if constexpr (std::is_same_v<Source, SourceSpec<Scalar>>) {
    for (Index j = 0; j <= ls.grid.ny; ++j)
      for (Index i = 0; i <= ls.grid.nx; ++i)
        fn[ls.grid.idx(i, j)] = f.eval(ls.grid.node(i, j));
  } else if constexpr (std::is_same_v<Source, ScalarField<Scalar>>) {
    fn = f.values;
  } else {
    for (Index j = 0; j <= ls.grid.ny; ++j)
      for (Index i = 0; i <= ls.grid.nx; ++i)
        fn[ls.grid.idx(i, j)] = f(ls.grid.node(i, j));
  }

  std::vector<PoissonSolution<Scalar>> levels;
  levels.reserve(depth);
  for (Index k = 0; k < depth; ++k) {
    PoissonOptions<Scalar> opts;
    opts.tol = copts.tol;
    opts.max_iterations = copts.max_iterations;
    if (copts.warm && Index(copts.warm->size()) > k)
      opts.guess = &(*copts.warm)[k].u;
    const ArrayX<Scalar>& rhs = (k == 0) ? fn : levels.back().u.values;
    levels.push_back(detail::solve_with_operator(op, ls, rhs, opts));
  }
  return levels;
}

// u extended past the interface by the linear ghost rule, so bilinear
// samples taken within a cell of the boundary see the right slope.
template <class Scalar>
ScalarField<Scalar> ghost_extended(const PoissonSolution<Scalar>& sol) {
  const Grid<Scalar>& g = sol.ls.grid;
  ScalarField<Scalar> e = sol.u;
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      if (sol.ls.inside(i, j)) continue;
      const Scalar phi_out = sol.ls.phi[g.idx(i, j)];
      Scalar acc = 0;
      int cnt = 0;
      auto probe = [&](Index ni, Index nj) {
        if (ni < 0 || ni > g.nx || nj < 0 || nj > g.ny) return;
        if (!sol.ls.inside(ni, nj)) return;
        const Scalar phi_in = sol.ls.phi[g.idx(ni, nj)];
        const Scalar theta =
            std::max(phi_in / (phi_in - phi_out), Scalar(1e-12));
        acc += sol.u.values[g.idx(ni, nj)] * (1 - 1 / theta);
        ++cnt;
      };
      probe(i - 1, j);
      probe(i + 1, j);
      probe(i, j - 1);
      probe(i, j + 1);
      if (cnt > 0) e.values[g.idx(i, j)] = acc / Scalar(cnt);
    }
  return e;
}

template <class Scalar>
struct BoundaryGradient {
  BoundaryTrace<Scalar> trace;
  ArrayX<Scalar> magnitude;  // |grad u| per vertex, >= 0
  BoolArray flagged;         // sliver vertices (interior sample landed outside)
  Index flagged_count = 0;
};

// |grad u| at each trace vertex: one-sided second-order difference along the
// inward normal through u = 0 at the vertex and bilinear samples at depths h
// and 2h.
template <class Scalar>
BoundaryGradient<Scalar> boundary_gradient(const PoissonSolution<Scalar>& sol,
                                           const BoundaryTrace<Scalar>& trace) {
  const Scalar h = sol.ls.grid.hmax();
  const ScalarField<Scalar> ext = ghost_extended(sol);

  BoundaryGradient<Scalar> bg;
  bg.trace = trace;
  const Index n = trace.vertex_count();
  bg.magnitude = ArrayX<Scalar>::Zero(n);
  bg.flagged = BoolArray::Constant(n, false);

  for (Index k = 0; k < n; ++k) {
    const Vec2<Scalar> p = trace.positions.col(k);
    const Vec2<Scalar> nu = trace.normals.col(k);
    const Vec2<Scalar> p1 = p - h * nu;
    const Vec2<Scalar> p2 = p - 2 * h * nu;
    if (!(sol.ls.sample(p1) < 0) || !(sol.ls.sample(p2) < 0)) {
      bg.flagged[k] = true;
      ++bg.flagged_count;
      continue;
    }
    const Scalar u1 = ext.sample(p1);
    const Scalar u2 = ext.sample(p2);
    bg.magnitude[k] = std::max(Scalar(0), (4 * u1 - u2) / (2 * h));
  }
  return bg;
}

template <class Scalar>
BoundaryGradient<Scalar> boundary_gradient(const PoissonSolution<Scalar>& sol) {
  return boundary_gradient(sol, extract_boundary(sol.ls));
}

// Smallest Dirichlet eigenvalue of the discrete operator by inverse power
// iteration on a Cholesky factorization.
template <class Scalar>
Scalar first_eigenvalue(const LevelSet<Scalar>& ls, Scalar tol = Scalar(1e-8),
                        Index max_iterations = 20000) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const DirichletOperator<Scalar> op(ls);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> ldlt(op.matrix);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("first_eigenvalue: factorization failed");

  Vec x = Vec::Ones(op.size()).normalized();
  Scalar lambda = 0;
  for (Index it = 0; it < max_iterations; ++it) {
    const Vec y = ldlt.solve(x);
    const Scalar next = x.dot(y) / y.squaredNorm();  // Rayleigh quotient of A
    const bool done = it > 0 && std::abs(next - lambda) <= tol * std::abs(next);
    lambda = next;
    x = y.normalized();
    if (done) return lambda;
  }
  throw SolverError("first_eigenvalue: iteration stagnated", double(lambda));
}

}  // namespace quadsurf
