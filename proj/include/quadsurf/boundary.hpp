// Marching-squares extraction of the zero set of a level set into oriented
// polylines. Orientation keeps the interior (phi < 0) on the left of the
// travel direction, so holes come out clockwise automatically. Interfaces
// that leave the hold-all box produce open polylines and are flagged.
#pragma once

#include <unordered_map>
#include <vector>

#include "quadsurf/level_set.hpp"

namespace quadsurf {

struct LoopSpan {
  Index begin = 0;
  Index count = 0;
  bool closed = true;
};

template <class Scalar>
struct BoundaryTrace {
  Mat2X<Scalar> positions;  // loop-major vertex coordinates
  Mat2X<Scalar> normals;    // unit outward normals
  ArrayX<Scalar> weights;   // trapezoid arclength weights, sum = length
  std::vector<LoopSpan> loops;
  bool has_open = false;

  Index vertex_count() const { return positions.cols(); }
  Scalar total_length() const { return weights.sum(); }
};

namespace detail {

// Global edge ids: horizontal edges first, then vertical.
template <class Scalar>
long long h_edge_id(const Grid<Scalar>& g, Index i, Index j) {
  return j * g.nx + i;
}
template <class Scalar>
long long v_edge_id(const Grid<Scalar>& g, Index i, Index j) {
  return g.nx * (g.ny + 1) + j * (g.nx + 1) + i;
}

}  // namespace detail

template <class Scalar>
BoundaryTrace<Scalar> extract_boundary(const LevelSet<Scalar>& ls) {
  const Grid<Scalar>& g = ls.grid;
  if (!ls.has_interface())
    throw std::runtime_error("extract_boundary: no zero crossing");

  // Crossing points, one per cut edge, shared between neighbouring cells.
  std::unordered_map<long long, Index> edge_vertex;
  std::vector<Vec2<Scalar>> crossings;
  auto crossing_on = [&](long long edge, Index i0, Index j0, Index i1,
                         Index j1) -> Index {
    auto it = edge_vertex.find(edge);
    if (it != edge_vertex.end()) return it->second;
    const Scalar pa = ls.at(i0, j0), pb = ls.at(i1, j1);
    const Scalar t = pa / (pa - pb);
    const Vec2<Scalar> a = g.node(i0, j0), b = g.node(i1, j1);
    const Index id = Index(crossings.size());
    crossings.push_back(a + t * (b - a));
    edge_vertex.emplace(edge, id);
    return id;
  };

  struct Seg {
    long long from_edge, to_edge;
    Index from_vtx, to_vtx;
  };
  std::vector<Seg> segs;

  for (Index j = 0; j < g.ny; ++j)
    for (Index i = 0; i < g.nx; ++i) {
      const bool in0 = ls.inside(i, j), in1 = ls.inside(i + 1, j);
      const bool in2 = ls.inside(i + 1, j + 1), in3 = ls.inside(i, j + 1);
      const int c = (in0 ? 1 : 0) | (in1 ? 2 : 0) | (in2 ? 4 : 0) |
                    (in3 ? 8 : 0);
      if (c == 0 || c == 15) continue;

      // Edge slots: 0 bottom, 1 right, 2 top, 3 left.
      long long eid[4] = {detail::h_edge_id(g, i, j),
                          detail::v_edge_id(g, i + 1, j),
                          detail::h_edge_id(g, i, j + 1),
                          detail::v_edge_id(g, i, j)};
      auto vtx = [&](int slot) -> Index {
        switch (slot) {
          case 0: return crossing_on(eid[0], i, j, i + 1, j);
          case 1: return crossing_on(eid[1], i + 1, j, i + 1, j + 1);
          case 2: return crossing_on(eid[2], i, j + 1, i + 1, j + 1);
          default: return crossing_on(eid[3], i, j, i, j + 1);
        }
      };
      auto emit = [&](int from, int to) {
        segs.push_back(Seg{eid[from], eid[to], vtx(from), vtx(to)});
      };

      switch (c) {
        case 1: emit(0, 3); break;
        case 2: emit(1, 0); break;
        case 3: emit(1, 3); break;
        case 4: emit(2, 1); break;
        case 6: emit(2, 0); break;
        case 7: emit(2, 3); break;
        case 8: emit(3, 2); break;
        case 9: emit(0, 2); break;
        case 11: emit(1, 2); break;
        case 12: emit(3, 1); break;
        case 13: emit(0, 1); break;
        case 14: emit(3, 0); break;
        case 5: {  // saddle: decide by the cell-centre average
          const Scalar m = (ls.at(i, j) + ls.at(i + 1, j) +
                            ls.at(i + 1, j + 1) + ls.at(i, j + 1)) /
                           4;
          if (m < 0) {
            emit(0, 1);
            emit(2, 3);
          } else {
            emit(0, 3);
            emit(2, 1);
          }
          break;
        }
        case 10: {
          const Scalar m = (ls.at(i, j) + ls.at(i + 1, j) +
                            ls.at(i + 1, j + 1) + ls.at(i, j + 1)) /
                           4;
          if (m < 0) {
            emit(3, 0);
            emit(1, 2);
          } else {
            emit(1, 0);
            emit(3, 2);
          }
          break;
        }
        default: break;
      }
    }

  if (segs.empty())
    throw std::runtime_error("extract_boundary: no zero crossing");

  // Chain segments: each cut edge has exactly one outgoing segment, so the
  // contour decomposes into closed loops plus open chains that start at
  // edges with no producer (interface leaving the box).
  std::unordered_map<long long, Index> out_of, into;
  for (Index s = 0; s < Index(segs.size()); ++s) {
    out_of.emplace(segs[s].from_edge, s);
    into.emplace(segs[s].to_edge, s);
  }

  std::vector<char> used(segs.size(), 0);
  std::vector<std::vector<Index>> chains;  // vertex id sequences
  std::vector<bool> chain_closed;

  auto walk = [&](Index start, bool closed) {
    std::vector<Index> verts;
    Index s = start;
    verts.push_back(segs[s].from_vtx);
    while (!used[s]) {
      used[s] = 1;
      verts.push_back(segs[s].to_vtx);
      auto it = out_of.find(segs[s].to_edge);
      if (it == out_of.end() || used[it->second]) break;
      s = it->second;
    }
    if (closed) verts.pop_back();  // last == first
    chains.push_back(std::move(verts));
    chain_closed.push_back(closed);
  };

  for (Index s = 0; s < Index(segs.size()); ++s)
    if (!used[s] && into.find(segs[s].from_edge) == into.end())
      walk(s, false);
  for (Index s = 0; s < Index(segs.size()); ++s)
    if (!used[s]) walk(s, true);

  // Assemble the trace; drop consecutive duplicates and degenerate chains.
  const ScalarField<Scalar> phi_field = ls.as_field();
  std::vector<Vec2<Scalar>> pos;
  std::vector<Vec2<Scalar>> nrm;
  std::vector<Scalar> wgt;
  BoundaryTrace<Scalar> trace;
  const Scalar eps = Scalar(1e-12) * g.hmin();

  for (size_t ci = 0; ci < chains.size(); ++ci) {
    std::vector<Vec2<Scalar>> v;
    for (Index id : chains[ci]) {
      const Vec2<Scalar>& p = crossings[id];
      if (v.empty() || (p - v.back()).norm() > eps) v.push_back(p);
    }
    const bool closed = chain_closed[ci];
    if (closed && v.size() > 1 && (v.front() - v.back()).norm() <= eps)
      v.pop_back();
    if (Index(v.size()) < (closed ? 3 : 2)) continue;

    const Index m = Index(v.size());
    const Index begin = Index(pos.size());
    for (Index k = 0; k < m; ++k) {
      Scalar w = 0;
      if (closed) {
        w = ((v[k] - v[(k + m - 1) % m]).norm() +
             (v[(k + 1) % m] - v[k]).norm()) /
            2;
      } else {
        if (k > 0) w += (v[k] - v[k - 1]).norm() / 2;
        if (k + 1 < m) w += (v[k + 1] - v[k]).norm() / 2;
      }
      Vec2<Scalar> n = sampled_gradient(phi_field, v[k]);
      if (n.norm() < Scalar(1e-10)) {  // fallback: rotate travel direction
        const Vec2<Scalar> d = v[(k + 1) % m] - v[(k + m - 1) % m];
        n = Vec2<Scalar>(d.y(), -d.x());
      }
      pos.push_back(v[k]);
      nrm.push_back(n.normalized());
      wgt.push_back(w);
    }
    trace.loops.push_back(LoopSpan{begin, m, closed});
    if (!closed) trace.has_open = true;
  }

  if (pos.empty())
    throw std::runtime_error("extract_boundary: degenerate interface");

  trace.positions.resize(2, Index(pos.size()));
  trace.normals.resize(2, Index(pos.size()));
  trace.weights.resize(Index(pos.size()));
  for (Index k = 0; k < Index(pos.size()); ++k) {
    trace.positions.col(k) = pos[k];
    trace.normals.col(k) = nrm[k];
    trace.weights[k] = wgt[k];
  }
  return trace;
}

}  // namespace quadsurf
