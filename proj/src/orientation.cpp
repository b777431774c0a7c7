#include <algorithm>
#include <deque>

#include "topocheck/geometry.hpp"

namespace topocheck {

namespace {

/// Orientation induced by an oriented simplex on one of its facets, relative to
/// the facet's sorted vertex order.
int induced_sign(const Simplex& oriented, const Simplex& sorted_face) {
  for (std::size_t drop = 0; drop < oriented.size(); ++drop) {
    Simplex rest;
    for (std::size_t k = 0; k < oriented.size(); ++k)
      if (k != drop) rest.push_back(oriented[k]);
    Simplex sorted = rest;
    std::sort(sorted.begin(), sorted.end());
    if (sorted == sorted_face) return ((drop % 2 == 0) ? 1 : -1) * permutation_sign(rest);
  }
  throw MeshError("orientation: face does not belong to simplex");
}

struct DualEdge {
  std::size_t other;
  int relation;  // required flip(other) = relation * flip(self)
};

std::vector<std::vector<DualEdge>> dual_graph(const SimplicialMesh& mesh) {
  std::vector<std::vector<DualEdge>> adj(mesh.simplex_count());
  for (const auto& [face, owners] : facet_incidence(mesh)) {
    if (owners.size() > 2) throw MeshError("non-manifold face shared by " + std::to_string(owners.size()) + " simplices");
    if (owners.size() < 2) continue;
    const std::size_t a = owners[0], b = owners[1];
    const int rel = -induced_sign(mesh.oriented_simplex(a), face) * induced_sign(mesh.oriented_simplex(b), face);
    adj[a].push_back({b, rel});
    adj[b].push_back({a, rel});
  }
  return adj;
}

}  // namespace

std::vector<int> OrientationReport::apply(const SimplicialMesh& mesh) const {
  if (!orientable) throw MeshError("cannot apply orientation to a non-orientable mesh");
  std::vector<int> signs = mesh.signs();
  for (std::size_t i = 0; i < signs.size(); ++i) signs[i] *= flips[i];
  return signs;
}

OrientationReport orient_mesh(const SimplicialMesh& mesh) {
  const auto adj = dual_graph(mesh);
  const std::size_t ns = mesh.simplex_count();
  std::vector<int> flip(ns, 0);
  std::vector<std::size_t> parent(ns, ns);
  std::vector<std::size_t> depth(ns, 0);

  for (std::size_t root = 0; root < ns; ++root) {
    if (flip[root] != 0) continue;
    flip[root] = 1;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop_front();
      for (const DualEdge& e : adj[s]) {
        const int want = e.relation * flip[s];
        if (flip[e.other] == 0) {
          flip[e.other] = want;
          parent[e.other] = s;
          depth[e.other] = depth[s] + 1;
          queue.push_back(e.other);
        } else if (flip[e.other] != want) {
          // conflicting constraint: close the cycle through the BFS tree
          std::vector<std::size_t> left{s}, right{e.other};
          std::size_t a = s, b = e.other;
          while (depth[a] > depth[b]) left.push_back(a = parent[a]);
          while (depth[b] > depth[a]) right.push_back(b = parent[b]);
          while (a != b) {
            left.push_back(a = parent[a]);
            right.push_back(b = parent[b]);
          }
          right.pop_back();  // common ancestor already on the left path
          std::reverse(right.begin(), right.end());
          OrientationReport report;
          report.orientable = false;
          report.odd_cycle = left;
          // left runs s -> ancestor; continue ancestor -> e.other
          report.odd_cycle.insert(report.odd_cycle.end(), right.begin(), right.end());
          return report;
        }
      }
    }
  }
  OrientationReport report;
  report.orientable = true;
  report.flips = std::move(flip);
  return report;
}

int cycle_orientation_parity(const SimplicialMesh& mesh, const std::vector<std::size_t>& cycle) {
  const auto adj = dual_graph(mesh);
  int parity = 1;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const std::size_t a = cycle[i], b = cycle[(i + 1) % cycle.size()];
    bool found = false;
    for (const DualEdge& e : adj[a])
      if (e.other == b) {
        parity *= e.relation;
        found = true;
        break;
      }
    if (!found) throw MeshError("cycle step between non-adjacent simplices");
  }
  return parity;
}

}  // namespace topocheck
