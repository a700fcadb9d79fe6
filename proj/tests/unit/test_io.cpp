#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "quadsurf/io.hpp"
#include "quadsurf/level_set.hpp"

using namespace quadsurf;
using Vec = Vec2<double>;

TEST_CASE("field dump round trip") {
  namespace fs = std::filesystem;
  const std::string base = (fs::temp_directory_path() / "qs_field_rt").string();

  Grid<double> g(Vec(-1.0, -2.0), Vec(3.0, 2.0), 32, 48);
  ScalarField<double> f = ScalarField<double>::from_function(
      g, [](const Vec& p) { return std::sin(p.x()) + 0.5 * p.y(); });
  write_field(f, base);

  // Raw payload is one f64 per node, y-outer.
  CHECK(fs::file_size(base + ".raw") == size_t(33 * 49 * 8));

  ScalarField<double> back = read_field(base);
  CHECK(back.grid.same_as(g));
  CHECK((back.values == f.values).all());

  fs::remove(base + ".raw");
  fs::remove(base + ".json");
}

TEST_CASE("trace CSV carries loop ids and vertices in loop order") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "qs_trace.csv").string();

  Grid<double> g = Grid<double>::square(-3.0, 3.0, 64);
  std::vector<Shape<double>> shapes = {Disk<double>{Vec(-1.2, 0), 0.5},
                                       Disk<double>{Vec(1.2, 0), 0.5}};
  BoundaryTrace<double> trace = extract_boundary(signed_distance(shapes, g));
  write_trace_csv(trace, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "loop_id,x,y");
  size_t rows = 0;
  int max_loop = -1;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    max_loop = std::max(max_loop, std::stoi(line.substr(0, line.find(','))));
  }
  CHECK(rows == size_t(trace.vertex_count()));
  CHECK(max_loop == 1);
  fs::remove(path);
}
