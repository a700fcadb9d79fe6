// Uniform node-centered Cartesian grid over a rectangular hold-all, plus
// grid-sampled scalar fields. All heavier machinery (level sets, traces,
// solvers) builds on these two types.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace quadsurf {

using Index = Eigen::Index;

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat2X = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

template <class Scalar>
struct Grid {
  Eigen::AlignedBox<Scalar, 2> box;
  Index nx = 0;  // cells along x; nodes are (nx+1) x (ny+1)
  Index ny = 0;

  Grid() = default;

  Grid(const Vec2<Scalar>& lo, const Vec2<Scalar>& hi, Index nx_, Index ny_)
      : box(lo, hi), nx(nx_), ny(ny_) {
    if (nx < 16 || ny < 16)
      throw std::invalid_argument("Grid: need at least 16 cells per axis");
    if (!(lo.x() < hi.x() && lo.y() < hi.y()))
      throw std::invalid_argument("Grid: empty box");
  }

  static Grid square(Scalar lo, Scalar hi, Index n) {
    return Grid(Vec2<Scalar>(lo, lo), Vec2<Scalar>(hi, hi), n, n);
  }

  Scalar hx() const { return (box.max().x() - box.min().x()) / Scalar(nx); }
  Scalar hy() const { return (box.max().y() - box.min().y()) / Scalar(ny); }
  Scalar hmax() const { return std::max(hx(), hy()); }
  Scalar hmin() const { return std::min(hx(), hy()); }

  Index node_count() const { return (nx + 1) * (ny + 1); }

  // Flat node index, y-outer row-major (matches the raw dump layout).
  Index idx(Index i, Index j) const { return j * (nx + 1) + i; }

  Vec2<Scalar> node(Index i, Index j) const {
    return Vec2<Scalar>(box.min().x() + Scalar(i) * hx(),
                        box.min().y() + Scalar(j) * hy());
  }

  bool same_as(const Grid& o) const {
    return nx == o.nx && ny == o.ny && box.min() == o.box.min() &&
           box.max() == o.box.max();
  }

  // Cell containing p (clamped to the grid) and local coordinates in [0,1].
  void locate(const Vec2<Scalar>& p, Index& i, Index& j, Scalar& fx,
              Scalar& fy) const {
    const Scalar sx = (p.x() - box.min().x()) / hx();
    const Scalar sy = (p.y() - box.min().y()) / hy();
    i = std::clamp<Index>(static_cast<Index>(std::floor(sx)), 0, nx - 1);
    j = std::clamp<Index>(static_cast<Index>(std::floor(sy)), 0, ny - 1);
    fx = std::clamp<Scalar>(sx - Scalar(i), Scalar(0), Scalar(1));
    fy = std::clamp<Scalar>(sy - Scalar(j), Scalar(0), Scalar(1));
  }
};

template <class Scalar>
struct ScalarField {
  Grid<Scalar> grid;
  ArrayX<Scalar> values;  // node samples, idx(i,j) layout

  ScalarField() = default;

  explicit ScalarField(const Grid<Scalar>& g)
      : grid(g), values(ArrayX<Scalar>::Zero(g.node_count())) {}

  template <class F>
  static ScalarField from_function(const Grid<Scalar>& g, F&& f) {
    ScalarField out(g);
    for (Index j = 0; j <= g.ny; ++j)
      for (Index i = 0; i <= g.nx; ++i)
        out.values[g.idx(i, j)] = f(g.node(i, j));
    return out;
  }

  Scalar& at(Index i, Index j) { return values[grid.idx(i, j)]; }
  Scalar at(Index i, Index j) const { return values[grid.idx(i, j)]; }

  // Bilinear sample, clamped to the box.
  Scalar sample(const Vec2<Scalar>& p) const {
    Index i, j;
    Scalar fx, fy;
    grid.locate(p, i, j, fx, fy);
    const Scalar v00 = at(i, j), v10 = at(i + 1, j);
    const Scalar v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
    return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
           (1 - fx) * fy * v01 + fx * fy * v11;
  }
};

// Central-difference gradient at a node; one-sided at the box edge.
template <class Scalar>
Vec2<Scalar> node_gradient(const ScalarField<Scalar>& f, Index i, Index j) {
  const Grid<Scalar>& g = f.grid;
  const Index ie = std::min(i + 1, g.nx), iw = std::max<Index>(i - 1, 0);
  const Index jn = std::min(j + 1, g.ny), js = std::max<Index>(j - 1, 0);
  const Scalar dx = Scalar(ie - iw) * g.hx();
  const Scalar dy = Scalar(jn - js) * g.hy();
  return Vec2<Scalar>((f.at(ie, j) - f.at(iw, j)) / dx,
                      (f.at(i, jn) - f.at(i, js)) / dy);
}

// Gradient of a node field sampled at an arbitrary point (bilinear on the
// per-node central differences).
template <class Scalar>
Vec2<Scalar> sampled_gradient(const ScalarField<Scalar>& f,
                              const Vec2<Scalar>& p) {
  Index i, j;
  Scalar fx, fy;
  f.grid.locate(p, i, j, fx, fy);
  const Vec2<Scalar> g00 = node_gradient(f, i, j);
  const Vec2<Scalar> g10 = node_gradient(f, i + 1, j);
  const Vec2<Scalar> g01 = node_gradient(f, i, j + 1);
  const Vec2<Scalar> g11 = node_gradient(f, i + 1, j + 1);
  return (1 - fx) * (1 - fy) * g00 + fx * (1 - fy) * g10 +
         (1 - fx) * fy * g01 + fx * fy * g11;
}

struct SolverError : std::runtime_error {
  double residual;
  explicit SolverError(const std::string& what, double res = 0.0)
      : std::runtime_error(what), residual(res) {}
};

}  // namespace quadsurf
