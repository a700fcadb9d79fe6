// On-disk formats: node fields as raw little-endian 64-bit floats in
// y-outer row-major order next to a JSON sidecar carrying the grid, and
// boundary traces as loop_id,x,y CSV in loop order.
#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <string>

#include "json.hpp"

#include "quadsurf/boundary.hpp"
#include "quadsurf/core.hpp"

namespace quadsurf {

static_assert(std::endian::native == std::endian::little,
              "field dumps are little-endian");

// Writes base.raw and base.json.
template <class Scalar>
void write_field(const ScalarField<Scalar>& f, const std::string& base) {
  std::ofstream raw(base + ".raw", std::ios::binary);
  if (!raw) throw std::runtime_error("write_field: cannot open " + base + ".raw");
  for (Index j = 0; j <= f.grid.ny; ++j)
    for (Index i = 0; i <= f.grid.nx; ++i) {
      const double v = double(f.at(i, j));
      raw.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  raw.close();

  nlohmann::json side;
  side["nx"] = f.grid.nx;
  side["ny"] = f.grid.ny;
  side["box"] = {f.grid.box.min().x(), f.grid.box.min().y(),
                 f.grid.box.max().x(), f.grid.box.max().y()};
  std::ofstream meta(base + ".json");
  if (!meta) throw std::runtime_error("write_field: cannot open " + base + ".json");
  meta << side.dump(2) << "\n";
}

inline ScalarField<double> read_field(const std::string& base) {
  std::ifstream meta(base + ".json");
  if (!meta) throw std::runtime_error("read_field: cannot open " + base + ".json");
  nlohmann::json side = nlohmann::json::parse(meta);
  const Index nx = side.at("nx").get<Index>();
  const Index ny = side.at("ny").get<Index>();
  const auto box = side.at("box").get<std::vector<double>>();
  if (box.size() != 4) throw std::runtime_error("read_field: bad box");
  Grid<double> grid(Vec2<double>(box[0], box[1]), Vec2<double>(box[2], box[3]),
                    nx, ny);

  ScalarField<double> f(grid);
  std::ifstream raw(base + ".raw", std::ios::binary);
  if (!raw) throw std::runtime_error("read_field: cannot open " + base + ".raw");
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i) {
      double v;
      raw.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!raw) throw std::runtime_error("read_field: short read");
      f.at(i, j) = v;
    }
  return f;
}

template <class Scalar>
void write_trace_csv(const BoundaryTrace<Scalar>& trace,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "loop_id,x,y\n";
  out << std::setprecision(17);
  for (size_t loop = 0; loop < trace.loops.size(); ++loop) {
    const LoopSpan& span = trace.loops[loop];
    for (Index k = 0; k < span.count; ++k) {
      const auto p = trace.positions.col(span.begin + k);
      out << loop << ',' << p.x() << ',' << p.y() << '\n';
    }
  }
}

}  // namespace quadsurf
