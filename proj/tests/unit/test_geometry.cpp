#include "doctest.h"

#include <cmath>
#include <random>

#include "quadsurf/level_set.hpp"
#include "quadsurf/shapes.hpp"

using namespace quadsurf;
using Vec = Vec2<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("grid basics") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 96);
  CHECK(g.hx() == doctest::Approx(0.0625));
  CHECK(g.node_count() == 97 * 97);
  CHECK(g.node(48, 48).x() == doctest::Approx(0.0));
  CHECK_THROWS_AS(Grid<double>::square(-1.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("signed distance to a disk is exact at nodes") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 96);
  LevelSet<double> ls = signed_distance(Disk<double>{Vec(0, 0), 1.0}, g);
  CHECK(ls.at(80, 48) == doctest::Approx(1.0).epsilon(1e-14));   // (2, 0)
  CHECK(ls.at(48, 48) == doctest::Approx(-1.0).epsilon(1e-14));  // (0, 0)
}

TEST_CASE("union level set is the min of member distances") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 96);
  std::vector<Shape<double>> both = {Disk<double>{Vec(0.5, 0), 1.0},
                                     Disk<double>{Vec(-0.5, 0), 1.0}};
  LevelSet<double> ls = signed_distance(both, g);
  CHECK(ls.at(48, 48) == doctest::Approx(-0.5).epsilon(1e-14));

  LevelSet<double> a = signed_distance(Shape<double>{Disk<double>{Vec(0.5, 0), 1.0}}, g);
  LevelSet<double> b = signed_distance(Shape<double>{Disk<double>{Vec(-0.5, 0), 1.0}}, g);
  LevelSet<double> u = level_set_union(a, b);
  CHECK((u.phi == ls.phi).all());
}

TEST_CASE("shape touching the box boundary is rejected") {
  Grid<double> g = Grid<double>::square(-3.0, 3.0, 96);
  CHECK_THROWS_AS(signed_distance(Disk<double>{Vec(2.9, 0), 1.0}, g),
                  std::invalid_argument);
}

TEST_CASE("signed distance to a convex polygon") {
  ConvexPolygon<double> sq{{Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)}};
  CHECK(signed_distance_to(sq, Vec(0.5, 0.5)) == doctest::Approx(-0.5));
  CHECK(signed_distance_to(sq, Vec(2.0, 0.5)) == doctest::Approx(1.0));
  CHECK(signed_distance_to(sq, Vec(1.5, 1.5)) ==
        doctest::Approx(std::sqrt(0.5)));
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.perimeter() == doctest::Approx(4.0));
}

TEST_CASE("convex hull keeps the square corners only") {
  std::vector<Vec> pts = {Vec(0, 0), Vec(1, 0),   Vec(1, 1),
                          Vec(0, 1), Vec(.5, .5), Vec(.25, .75)};
  ConvexPolygon<double> hull = convex_hull(pts);
  CHECK(hull.vertices.size() == 4);
  CHECK(hull.area() == doctest::Approx(1.0));
}

TEST_CASE("convex hull of dense circle samples matches the inscribed polygon") {
  const int M = 512;
  std::vector<Vec> pts;
  for (int k = 0; k < M; ++k) {
    const double t = 2 * kPi * k / M;
    pts.emplace_back(std::cos(t), std::sin(t));
  }
  // Shuffle to exercise hull ordering.
  std::mt19937 rng(7);
  std::shuffle(pts.begin(), pts.end(), rng);
  ConvexPolygon<double> hull = convex_hull(pts);
  CHECK(hull.vertices.size() == size_t(M));
  const double inscribed = 0.5 * M * std::sin(2 * kPi / M);
  CHECK(hull.area() == doctest::Approx(inscribed).epsilon(1e-12));
  CHECK(std::abs(hull.area() - kPi) < 1e-3);  // O(1/M^2) deficit
}

TEST_CASE("collinear input is rejected") {
  std::vector<Vec> pts = {Vec(0, 0), Vec(1, 1), Vec(2, 2), Vec(3, 3)};
  CHECK_THROWS_AS(convex_hull(pts), std::invalid_argument);
}

TEST_CASE("source spec: hull, mass, point membership") {
  SourceSpec<double> f({{Disk<double>{Vec(0, 0), 0.5}, 4.0}});
  CHECK(f.total_mass() == doctest::Approx(kPi));
  CHECK(f.eval(Vec(0, 0)) == doctest::Approx(4.0));
  CHECK(f.eval(Vec(0.6, 0)) == doctest::Approx(0.0));
  CHECK(f.hull.area() == doctest::Approx(kPi * 0.25).epsilon(1e-4));
  for (const auto& v : f.hull.vertices) CHECK(v.norm() == doctest::Approx(0.5));

  CHECK_THROWS_AS(SourceSpec<double>({{Disk<double>{Vec(0, 0), 0.5}, -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SourceSpec<double>({}), std::invalid_argument);
}

TEST_CASE("source spec hull of a single disk contains the disk sampling") {
  SourceSpec<double> f({{Disk<double>{Vec(0.2, -0.1), 0.3}, 1.0}});
  CHECK(f.hull.contains(Vec(0.2, -0.1)));
  CHECK(f.hull.contains(Vec(0.2 + 0.29, -0.1)));
  CHECK_FALSE(f.hull.contains(Vec(0.2 + 0.31, -0.1)));
}
