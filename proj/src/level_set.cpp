#include <algorithm>
#include <array>
#include <numeric>
#include <unordered_map>

#include "topocheck/geometry.hpp"

namespace topocheck {

Vec project_to_level(const ScalarSpec& v, double level, const Vec& x) {
  const Vec g = v.gradient(x);
  const double g2 = g.squaredNorm();
  if (g2 == 0.0) return x;
  return x - ((v.evaluate(x) - level) / g2) * g;
}

namespace {

struct Crossing {
  Index a;  // grid node on the low side (or the node itself for exact hits)
  Index b;  // grid node on the high side; a == b marks an exact hit
};

/// Kuhn decomposition of the unit cube: one simplex per axis permutation,
/// listed as corner bitmasks. Shared faces of neighbouring cells agree.
std::vector<std::vector<int>> kuhn_simplices(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    std::vector<int> s{0};
    int mask = 0;
    for (int axis : perm) {
      mask |= (1 << axis);
      s.push_back(mask);
    }
    out.push_back(std::move(s));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

double det_with_offset(const Vec& w, const std::vector<Vec>& pts) {
  // det[w - p0, p1 - p0, ..., p_{n-1} - p0]
  const auto n = w.size();
  Mat m(n, n);
  m.col(0) = w - pts[0];
  for (Eigen::Index k = 1; k < n; ++k) m.col(k) = pts[static_cast<std::size_t>(k)] - pts[0];
  return m.determinant();
}

}  // namespace

SimplicialMesh extract_level_set(const ScalarSpec& v, double level, const Box& box, int resolution) {
  const int n = v.dim();
  if (n != 2 && n != 3) throw PreconditionError("extract_level_set: only n = 2 or 3 supported");
  if (resolution < 8) throw PreconditionError("extract_level_set: resolution must be >= 8");
  if (box.dim() != n) throw PreconditionError("extract_level_set: box dimension mismatch");

  const Index per_axis = resolution + 1;
  Index node_count = 1;
  for (int i = 0; i < n; ++i) node_count *= per_axis;

  auto node_coords = [&](Index id) {
    Vec p(n);
    for (int i = 0; i < n; ++i) {
      const Index c = id % per_axis;
      id /= per_axis;
      p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * static_cast<double>(c) / resolution;
    }
    return p;
  };

  std::vector<double> values(static_cast<std::size_t>(node_count));
  for (Index id = 0; id < node_count; ++id) values[static_cast<std::size_t>(id)] = v.evaluate(node_coords(id));
  auto above = [&](Index id) { return values[static_cast<std::size_t>(id)] > level; };

  // crossing vertices, keyed by (low node, high node); exact hits by (node, node)
  std::unordered_map<std::uint64_t, Index> crossing_id;
  std::vector<Crossing> crossings;
  auto crossing_for = [&](Index low, Index high) -> Index {
    if (values[static_cast<std::size_t>(low)] == level) high = low;
    const std::uint64_t key = static_cast<std::uint64_t>(low) * static_cast<std::uint64_t>(node_count) +
                              static_cast<std::uint64_t>(high);
    auto [it, inserted] = crossing_id.emplace(key, static_cast<Index>(crossings.size()));
    if (inserted) crossings.push_back({low, high});
    return it->second;
  };

  const auto kuhn = kuhn_simplices(n);
  std::vector<Simplex> simplices;
  std::vector<Index> cell(static_cast<std::size_t>(n), 0);
  Index cell_count = 1;
  for (int i = 0; i < n; ++i) cell_count *= resolution;

  std::vector<Index> corner(static_cast<std::size_t>(1) << n);
  for (Index c = 0; c < cell_count; ++c) {
    Index rem = c;
    Index base = 0, stride = 1;
    for (int i = 0; i < n; ++i) {
      base += (rem % resolution) * stride;
      rem /= resolution;
      stride *= per_axis;
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
      Index id = base, s = 1;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) id += s;
        s *= per_axis;
      }
      corner[static_cast<std::size_t>(mask)] = id;
    }

    for (const auto& ks : kuhn) {
      std::vector<Index> hi, lo;
      for (int m : ks) (above(corner[static_cast<std::size_t>(m)]) ? hi : lo).push_back(corner[static_cast<std::size_t>(m)]);
      if (hi.empty() || lo.empty()) continue;

      Vec hi_centroid = Vec::Zero(n);
      for (Index h : hi) hi_centroid += node_coords(h);
      hi_centroid /= static_cast<double>(hi.size());

      // polygon of crossing edges, in cyclic order for the 2-2 tetrahedron case
      std::vector<std::pair<Index, Index>> edges;
      if (n == 2) {
        for (Index l : lo)
          for (Index h : hi) edges.emplace_back(l, h);
      } else if (hi.size() == 2 && lo.size() == 2) {
        edges = {{lo[0], hi[0]}, {lo[1], hi[0]}, {lo[1], hi[1]}, {lo[0], hi[1]}};
      } else {
        for (Index l : lo)
          for (Index h : hi) edges.emplace_back(l, h);
      }

      auto emit = [&](const std::vector<std::pair<Index, Index>>& e) {
        // orientation decided on edge midpoints, which stay well separated
        std::vector<Vec> mids;
        for (const auto& [l, h] : e) mids.push_back(0.5 * (node_coords(l) + node_coords(h)));
        Simplex s;
        for (const auto& [l, h] : e) s.push_back(crossing_for(l, h));
        if (det_with_offset(hi_centroid, mids) < 0) std::swap(s[0], s[1]);
        simplices.push_back(std::move(s));
      };
      if (edges.size() == static_cast<std::size_t>(n)) {
        emit(edges);
      } else {
        emit({edges[0], edges[1], edges[2]});
        emit({edges[0], edges[2], edges[3]});
      }
    }
  }

  // positions; every crossing must be a regular point of V
  std::vector<Vec> verts;
  verts.reserve(crossings.size());
  for (const Crossing& c : crossings) {
    Vec p;
    if (c.a == c.b) {
      p = node_coords(c.a);
    } else {
      const double va = values[static_cast<std::size_t>(c.a)];
      const double vb = values[static_cast<std::size_t>(c.b)];
      const double t = (level - va) / (vb - va);
      p = (1.0 - t) * node_coords(c.a) + t * node_coords(c.b);
    }
    if (v.gradient(p).norm() < 1e-8) throw RegularityError("level set is not regular: grad V vanishes", p);
    verts.push_back(project_to_level(v, level, p));
  }

  // drop simplices collapsed by exact hits, then compact the vertex table
  std::vector<Simplex> kept;
  for (Simplex& s : simplices)
    if (permutation_sign(s) != 0) kept.push_back(std::move(s));
  if (kept.empty()) throw PreconditionError("extract_level_set: level set does not meet the box");

  std::vector<Index> remap(verts.size(), -1);
  std::vector<Vec> used;
  for (Simplex& s : kept)
    for (Index& id : s) {
      auto& r = remap[static_cast<std::size_t>(id)];
      if (r < 0) {
        r = static_cast<Index>(used.size());
        used.push_back(verts[static_cast<std::size_t>(id)]);
      }
      id = r;
    }
  return SimplicialMesh(n, n - 1, std::move(used), std::move(kept));
}

}  // namespace topocheck
