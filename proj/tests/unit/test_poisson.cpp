#include "doctest.h"

#include <cmath>
#include <random>

#include "quadsurf/integrate.hpp"
#include "quadsurf/poisson.hpp"
#include "quadsurf/radial.hpp"

using namespace quadsurf;
using Vec = Vec2<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_error_vs(const PoissonSolution<double>& sol,
                    const std::function<double(double)>& radial_exact) {
  const Grid<double>& g = sol.ls.grid;
  double worst = 0;
  for (Index j = 0; j <= g.ny; ++j)
    for (Index i = 0; i <= g.nx; ++i) {
      if (!sol.ls.inside(i, j)) continue;
      const double r = g.node(i, j).norm();
      worst = std::max(worst,
                       std::abs(sol.u.at(i, j) - radial_exact(r)));
    }
  return worst;
}

}  // namespace

TEST_CASE("poisson on the unit disk matches (1 - r^2)/4 at second order") {
  auto solve_at = [](Index n) {
    Grid<double> g = Grid<double>::square(-1.5, 1.5, n);
    LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
    return solve_poisson(ls, [](const Vec&) { return 1.0; });
  };
  auto exact = [](double r) { return (1 - r * r) / 4; };

  PoissonSolution<double> s64 = solve_at(64);
  PoissonSolution<double> s128 = solve_at(128);
  const double e64 = max_error_vs(s64, exact);
  const double e128 = max_error_vs(s128, exact);

  CHECK(s128.u.sample(Vec(0, 0)) == doctest::Approx(0.25).epsilon(2e-3));
  CHECK(s128.linear_residual <= 1e-10);
  CHECK(e128 < e64 / std::pow(2.0, 1.5));  // observed order >= 1.5
}

TEST_CASE("zero source gives the zero solution exactly") {
  Grid<double> g = Grid<double>::square(-1.5, 1.5, 64);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
  PoissonSolution<double> sol =
      solve_poisson(ls, [](const Vec&) { return 0.0; });
  CHECK((sol.u.values == 0.0).all());
  CHECK(sol.iterations == 0);
}

TEST_CASE("compact source on a larger disk reproduces the log profile") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 256);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 2.0}, g);
  SourceSpec<double> f({{Disk<double>{Vec(0, 0), 0.5}, 4.0}});
  PoissonSolution<double> sol = solve_poisson(ls, f);

  auto exact = [](double r) {
    return r >= 0.5 ? 0.5 * std::log(2.0 / r)
                    : std::log(2.0) + 0.25 - r * r;
  };
  CHECK(max_error_vs(sol, exact) < 5e-3);
}

TEST_CASE("cascade depth 1 equals a plain solve") {
  Grid<double> g = Grid<double>::square(-1.5, 1.5, 64);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
  auto one = [](const Vec&) { return 1.0; };
  PoissonSolution<double> direct = solve_poisson(ls, one);
  std::vector<PoissonSolution<double>> casc = solve_cascade(ls, one, 1);
  REQUIRE(casc.size() == 1);
  CHECK((casc[0].u.values == direct.u.values).all());
}

TEST_CASE("cascade depth 2 boundary data on the unit disk") {
  Grid<double> g = Grid<double>::square(-1.5, 1.5, 128);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
  auto levels = solve_cascade(ls, [](const Vec&) { return 1.0; }, 2);
  REQUIRE(levels.size() == 2);

  BoundaryTrace<double> trace = extract_boundary(ls);
  BoundaryGradient<double> bu = boundary_gradient(levels[0], trace);
  BoundaryGradient<double> bv = boundary_gradient(levels[1], trace);
  CHECK(bu.flagged_count == 0);
  CHECK(bv.flagged_count == 0);

  const double h = g.hmax();
  double worst_u = 0, worst_v = 0, worst_prod = 0;
  for (Index k = 0; k < trace.vertex_count(); ++k) {
    worst_u = std::max(worst_u, std::abs(bu.magnitude[k] - 0.5));
    worst_v = std::max(worst_v, std::abs(bv.magnitude[k] - 0.0625));
    worst_prod = std::max(
        worst_prod, std::abs(bu.magnitude[k] * bv.magnitude[k] - 1.0 / 32));
  }
  CHECK(worst_u <= 3 * h);
  CHECK(worst_v <= 3 * h);
  CHECK(worst_prod <= 3 * h);
  // The one-sided stencil does far better than the 3h contract in practice.
  CHECK(worst_u <= 0.01);
  CHECK(worst_prod <= 0.0015);
}

TEST_CASE("boundary gradient of the compact-source annulus solution") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 256);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 2.0}, g);
  SourceSpec<double> f({{Disk<double>{Vec(0, 0), 0.5}, 4.0}});
  PoissonSolution<double> sol = solve_poisson(ls, f);
  BoundaryGradient<double> bg = boundary_gradient(sol);
  const double h = g.hmax();
  for (Index k = 0; k < bg.magnitude.size(); ++k)
    if (!bg.flagged[k]) CHECK(std::abs(bg.magnitude[k] - 0.25) <= 3 * h);
}

TEST_CASE("zero source gives zero boundary gradient") {
  Grid<double> g = Grid<double>::square(-1.5, 1.5, 64);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
  PoissonSolution<double> sol =
      solve_poisson(ls, [](const Vec&) { return 0.0; });
  BoundaryGradient<double> bg = boundary_gradient(sol);
  CHECK(bg.magnitude.abs().maxCoeff() == 0.0);
}

TEST_CASE("discrete maximum principle and source monotonicity") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 24 + Index(unit(rng) * 24);
    Grid<double> g = Grid<double>::square(-2.0, 2.0, n);
    const double r = 0.4 + unit(rng) * 0.4;
    const Vec c(unit(rng) * 0.4 - 0.2, unit(rng) * 0.4 - 0.2);
    LevelSet<double> ls = signed_distance(Disk<double>{c, r}, g);

    const double amp = 0.5 + unit(rng) * 4.0;
    const double bump_r = 0.2 + unit(rng) * 0.3;
    auto f1 = [&](const Vec& p) {
      return (p - c).norm() < bump_r ? amp : 0.1 * amp;
    };
    auto f2 = [&](const Vec& p) { return f1(p) + 0.3 * amp; };

    PoissonSolution<double> u1 = solve_poisson(ls, f1);
    PoissonSolution<double> u2 = solve_poisson(ls, f2);
    const double m1 = u1.u.values.maxCoeff();
    const double m2 = u2.u.values.maxCoeff();
    CHECK(u1.u.values.minCoeff() >= -1e-10 * m1);
    CHECK(u2.u.values.minCoeff() >= -1e-10 * m2);
    CHECK(((u2.u.values - u1.u.values) >= -1e-10 * m2).all());
  }
}

TEST_CASE("domain monotonicity on nested disks") {
  Grid<double> g = Grid<double>::square(-2.0, 2.0, 96);
  LevelSet<double> big = signed_distance(Disk<double>{Vec(0, 0), 1.2}, g);
  LevelSet<double> small = signed_distance(Disk<double>{Vec(0, 0), 0.7}, g);
  auto one = [](const Vec&) { return 1.0; };
  PoissonSolution<double> ub = solve_poisson(big, one);
  PoissonSolution<double> us = solve_poisson(small, one);
  const double scale = ub.u.values.maxCoeff();
  for (Index k = 0; k < g.node_count(); ++k)
    if (small.phi[k] < 0) CHECK(us.u.values[k] <= ub.u.values[k] + 1e-8 * scale);
}

TEST_CASE("boundary flux balances the source mass within 5%") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 256);
  SourceSpec<double> f({{Disk<double>{Vec(0, 0), 0.5}, 4.0}});
  for (double R : {1.0, 2.0}) {
    LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), R}, g);
    PoissonSolution<double> sol = solve_poisson(ls, f);
    BoundaryGradient<double> bg = boundary_gradient(sol);
    double flux = 0;
    for (Index k = 0; k < bg.magnitude.size(); ++k)
      if (!bg.flagged[k]) flux += bg.trace.weights[k] * bg.magnitude[k];
    CHECK(std::abs(flux - kPi) <= 0.05 * kPi);
  }
}

TEST_CASE("first Dirichlet eigenvalue: disk, square, scaling") {
  // Unit disk: square of the first Bessel J0 root.
  const double bessel = 5.783185962946785;
  Grid<double> gd = Grid<double>::square(-1.5, 1.5, 192);
  LevelSet<double> disk = signed_distance(Disk<double>{Vec(0, 0), 1.0}, gd);
  const double lam_disk = first_eigenvalue(disk);
  CHECK(lam_disk == doctest::Approx(bessel).epsilon(0.02));

  // Unit square: 2 pi^2 by separation of variables.
  Grid<double> gs = Grid<double>::square(-0.25, 1.25, 192);
  ConvexPolygon<double> sq{{Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)}};
  LevelSet<double> square = signed_distance(sq, gs);
  const double lam_square = first_eigenvalue(square);
  CHECK(lam_square == doctest::Approx(2 * kPi * kPi).epsilon(0.02));

  // lambda(t Omega) = lambda(Omega)/t^2 at matched resolution per radius.
  Grid<double> g2 = Grid<double>::square(-3.0, 3.0, 192);
  LevelSet<double> disk2 = signed_distance(Disk<double>{Vec(0, 0), 2.0}, g2);
  const double lam_disk2 = first_eigenvalue(disk2);
  CHECK(lam_disk2 / lam_disk == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("warm start converges to the same answer faster") {
  Grid<double> g = Grid<double>::square(-1.5, 1.5, 128);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
  auto one = [](const Vec&) { return 1.0; };
  PoissonSolution<double> cold = solve_poisson(ls, one);

  PoissonOptions<double> opts;
  opts.guess = &cold.u;
  PoissonSolution<double> warm = solve_poisson(ls, one, opts);
  CHECK(warm.iterations <= cold.iterations / 4);
  CHECK((warm.u.values - cold.u.values).abs().maxCoeff() < 1e-9);
}
