#include "topocheck/mesh.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace topocheck {

SimplicialMesh::SimplicialMesh(int ambient_dim, int dim, std::vector<Vec> vertices, std::vector<Simplex> simplices,
                               std::vector<int> signs)
    : ambient_(ambient_dim),
      dim_(dim),
      vertices_(std::move(vertices)),
      simplices_(std::move(simplices)),
      signs_(std::move(signs)) {
  if (ambient_ < 1 || dim_ < 0 || dim_ > ambient_) throw MeshError("mesh: invalid dimensions");
  if (signs_.empty()) signs_.assign(simplices_.size(), 1);
  if (signs_.size() != simplices_.size()) throw MeshError("mesh: one sign per simplex required");
  for (const Vec& v : vertices_)
    if (v.size() != ambient_) throw MeshError("mesh: vertex has wrong ambient dimension");
  const auto nv = static_cast<Index>(vertices_.size());
  for (std::size_t s = 0; s < simplices_.size(); ++s) {
    const Simplex& simplex = simplices_[s];
    if (static_cast<int>(simplex.size()) != dim_ + 1) throw MeshError("mesh: simplex has wrong vertex count");
    for (Index v : simplex)
      if (v < 0 || v >= nv) throw MeshError("mesh: vertex index out of range");
    if (permutation_sign(simplex) == 0) throw MeshError("mesh: simplex repeats a vertex");
    if (signs_[s] != 1 && signs_[s] != -1) throw MeshError("mesh: orientation sign must be +1 or -1");
  }
}

Simplex SimplicialMesh::oriented_simplex(std::size_t i) const {
  Simplex s = simplices_[i];
  if (signs_[i] < 0 && s.size() >= 2) std::swap(s[0], s[1]);
  return s;
}

SimplicialMesh SimplicialMesh::with_signs(std::vector<int> signs) const {
  return SimplicialMesh(ambient_, dim_, vertices_, simplices_, std::move(signs));
}

SimplicialMesh SimplicialMesh::reversed() const {
  std::vector<int> flipped = signs_;
  for (int& s : flipped) s = -s;
  return with_signs(std::move(flipped));
}

bool SimplicialMesh::is_closed() const {
  if (dim_ == 0) return false;
  for (const auto& [face, owners] : facet_incidence(*this))
    if (owners.size() != 2) return false;
  return true;
}

int permutation_sign(const Simplex& s) {
  Simplex work = s;
  int sign = 1;
  // selection sort counting transpositions; simplices are tiny
  for (std::size_t i = 0; i < work.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < work.size(); ++j)
      if (work[j] < work[best]) best = j;
    if (best != i) {
      std::swap(work[i], work[best]);
      sign = -sign;
    }
    if (i > 0 && work[i] == work[i - 1]) return 0;
  }
  return sign;
}

std::map<Simplex, std::vector<std::size_t>> facet_incidence(const SimplicialMesh& mesh) {
  std::map<Simplex, std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    const Simplex& simplex = mesh.simplices()[s];
    for (std::size_t drop = 0; drop < simplex.size(); ++drop) {
      Simplex face;
      face.reserve(simplex.size() - 1);
      for (std::size_t k = 0; k < simplex.size(); ++k)
        if (k != drop) face.push_back(simplex[k]);
      std::sort(face.begin(), face.end());
      out[face].push_back(s);
    }
  }
  return out;
}

std::vector<std::vector<Simplex>> all_faces(const SimplicialMesh& mesh) {
  const int d = mesh.dim();
  std::vector<std::vector<Simplex>> faces(static_cast<std::size_t>(d) + 1);
  std::vector<std::map<Simplex, bool>> seen(static_cast<std::size_t>(d) + 1);
  for (const Simplex& top : mesh.simplices()) {
    Simplex sorted = top;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    // every non-empty subset of the top simplex
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      Simplex face;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (std::uint64_t{1} << b)) face.push_back(sorted[b]);
      const std::size_t fd = face.size() - 1;
      if (seen[fd].emplace(face, true).second) faces[fd].push_back(std::move(face));
    }
  }
  for (auto& level : faces) std::sort(level.begin(), level.end());
  return faces;
}

namespace {

/// Child simplices of the k=2 edgewise subdivision of a d-simplex. Each child
/// vertex is a pair (i, j), i <= j, meaning the midpoint of parent vertices i
/// and j (a parent vertex when i == j). Children are ordered so that they carry
/// the parent's orientation.
std::vector<std::vector<std::pair<int, int>>> edgewise_template(int d) {
  std::vector<std::vector<std::pair<int, int>>> out;
  if (d == 0) {
    out.push_back({{0, 0}});
    return out;
  }
  auto to_bary_pair = [d](const std::vector<int>& x) {
    // staircase coordinates -> barycentric weights summing to 2
    std::vector<int> lambda(static_cast<std::size_t>(d) + 1);
    lambda[0] = 2 - x[0];
    for (int i = 1; i < d; ++i) lambda[i] = x[i - 1] - x[i];
    lambda[d] = x[d - 1];
    std::vector<int> idx;
    for (int i = 0; i <= d; ++i)
      for (int c = 0; c < lambda[i]; ++c) idx.push_back(i);
    return std::make_pair(idx[0], idx[1]);
  };
  auto admissible = [d](const std::vector<int>& x) {
    if (x[0] > 2 || x[d - 1] < 0) return false;
    for (int i = 1; i < d; ++i)
      if (x[i] > x[i - 1]) return false;
    return true;
  };
  std::vector<int> perm(static_cast<std::size_t>(d));
  for (std::uint64_t corner = 0; corner < (std::uint64_t{1} << d); ++corner) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<std::vector<int>> pts;
      std::vector<int> p(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) p[i] = static_cast<int>((corner >> i) & 1u);
      pts.push_back(p);
      for (int t = 0; t < d; ++t) {
        p[perm[t]] += 1;
        pts.push_back(p);
      }
      if (!std::all_of(pts.begin(), pts.end(), admissible)) continue;
      Mat m(d, d);
      for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) m(r, c) = pts[c + 1][r] - pts[0][r];
      std::vector<std::pair<int, int>> child;
      for (const auto& q : pts) child.push_back(to_bary_pair(q));
      if (m.determinant() < 0) std::swap(child[0], child[1]);
      out.push_back(std::move(child));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

}  // namespace

SimplicialMesh refine_uniform(const SimplicialMesh& mesh, const std::function<Vec(const Vec&)>& project) {
  const auto tmpl = edgewise_template(mesh.dim());
  std::vector<Vec> verts = mesh.vertices();
  std::map<std::pair<Index, Index>, Index> midpoint;
  auto vertex_for = [&](Index a, Index b) -> Index {
    if (a == b) return a;
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec p = 0.5 * (verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]);
    if (project) p = project(p);
    verts.push_back(std::move(p));
    const Index id = static_cast<Index>(verts.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<Simplex> simplices;
  std::vector<int> signs;
  simplices.reserve(mesh.simplex_count() * tmpl.size());
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    // Subdivide in globally sorted vertex order so shared faces split alike.
    Simplex sorted = mesh.simplices()[s];
    const int sort_sign = permutation_sign(sorted);
    std::sort(sorted.begin(), sorted.end());
    const int child_sign = sort_sign * mesh.signs()[s];
    for (const auto& child : tmpl) {
      Simplex c;
      c.reserve(child.size());
      for (const auto& [i, j] : child) c.push_back(vertex_for(sorted[i], sorted[j]));
      simplices.push_back(std::move(c));
      signs.push_back(child_sign);
    }
  }
  return SimplicialMesh(mesh.ambient_dim(), mesh.dim(), std::move(verts), std::move(simplices), std::move(signs));
}

void write_mesh(std::ostream& out, const SimplicialMesh& mesh) {
  out << "topocheck-mesh 1\n";
  out << "ambient " << mesh.ambient_dim() << " dim " << mesh.dim() << "\n";
  out << "vertices " << mesh.vertex_count() << "\n";
  out << std::setprecision(17);
  for (const Vec& v : mesh.vertices()) {
    for (int i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << "\n";
  }
  out << "simplices " << mesh.simplex_count() << "\n";
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    out << mesh.signs()[s];
    for (Index v : mesh.simplices()[s]) out << " " << v;
    out << "\n";
  }
}

namespace {

void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw MeshError("mesh file: expected '" + token + "', got '" + got + "'");
}

}  // namespace

SimplicialMesh read_mesh(std::istream& in) {
  expect_token(in, "topocheck-mesh");
  int version = 0;
  if (!(in >> version) || version != 1) throw MeshError("mesh file: unsupported version");
  int ambient = 0, dim = 0;
  expect_token(in, "ambient");
  in >> ambient;
  expect_token(in, "dim");
  in >> dim;
  std::size_t nv = 0;
  expect_token(in, "vertices");
  if (!(in >> nv)) throw MeshError("mesh file: bad vertex count");
  std::vector<Vec> verts(nv, Vec(ambient));
  for (auto& v : verts)
    for (int i = 0; i < ambient; ++i)
      if (!(in >> v[i])) throw MeshError("mesh file: truncated vertex table");
  std::size_t ns = 0;
  expect_token(in, "simplices");
  if (!(in >> ns)) throw MeshError("mesh file: bad simplex count");
  std::vector<Simplex> simplices(ns, Simplex(static_cast<std::size_t>(dim) + 1));
  std::vector<int> signs(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    if (!(in >> signs[s])) throw MeshError("mesh file: truncated simplex table");
    for (auto& v : simplices[s])
      if (!(in >> v)) throw MeshError("mesh file: truncated simplex table");
  }
  return SimplicialMesh(ambient, dim, std::move(verts), std::move(simplices), std::move(signs));
}

}  // namespace topocheck
