#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "topocheck/common.hpp"

namespace topocheck {

using Simplex = std::vector<Index>;

/// Oriented simplicial complex embedded in R^n, stored by its top simplices.
///
/// Orientation convention for hypersurface meshes (dim = n - 1): the oriented
/// simplex (v0, ..., v_{n-1}) is positive when det[nu, v1 - v0, ..., v_{n-1} - v0]
/// is positive, nu being the outward normal. The stored sign multiplies the
/// orientation given by the vertex order.
class SimplicialMesh {
 public:
  SimplicialMesh() = default;
  SimplicialMesh(int ambient_dim, int dim, std::vector<Vec> vertices, std::vector<Simplex> simplices,
                 std::vector<int> signs = {});

  int ambient_dim() const { return ambient_; }
  int dim() const { return dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const std::vector<int>& signs() const { return signs_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t simplex_count() const { return simplices_.size(); }
  const Vec& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }

  /// Vertex list with the sign folded into the order (first two swapped when negative).
  Simplex oriented_simplex(std::size_t i) const;

  SimplicialMesh with_signs(std::vector<int> signs) const;
  SimplicialMesh reversed() const;

  /// Every (dim-1)-face lies in exactly two top simplices.
  bool is_closed() const;

 private:
  int ambient_ = 0;
  int dim_ = 0;
  std::vector<Vec> vertices_;
  std::vector<Simplex> simplices_;
  std::vector<int> signs_;
};

/// Sorted (dim-1)-faces mapped to the indices of the top simplices containing them.
std::map<Simplex, std::vector<std::size_t>> facet_incidence(const SimplicialMesh& mesh);

/// All faces of every dimension 0..dim, each as a sorted vertex list.
std::vector<std::vector<Simplex>> all_faces(const SimplicialMesh& mesh);

/// Sign of the permutation that sorts `s` (+1 even, -1 odd); 0 on repeats.
int permutation_sign(const Simplex& s);

/// Uniform edgewise (Freudenthal) subdivision: each k-simplex becomes 2^k
/// children, orientations inherited. New vertices are edge midpoints, passed
/// through `project` when given. Conforming across shared faces.
SimplicialMesh refine_uniform(const SimplicialMesh& mesh,
                              const std::function<Vec(const Vec&)>& project = nullptr);

/// Text format:
///   topocheck-mesh 1
///   ambient <n> dim <d>
///   vertices <V>
///   <x_1> ... <x_n>            (V lines)
///   simplices <S>
///   <sign> <i_0> ... <i_d>     (S lines, zero-based vertex indices)
void write_mesh(std::ostream& out, const SimplicialMesh& mesh);
SimplicialMesh read_mesh(std::istream& in);

}  // namespace topocheck
