#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the degree, homology or condition code under test.

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "topocheck/field.hpp"
#include "topocheck/homology.hpp"
#include "topocheck/mesh.hpp"

namespace oracle {

using topocheck::BigInt;
using topocheck::Index;
using topocheck::IntMatrix;
using topocheck::SimplicialMesh;
using topocheck::Vec;
using topocheck::VectorFieldFn;

/// Winding number of f along the circle |x - c| = r by direct angle accumulation.
inline double winding(const VectorFieldFn& f, const Vec& c, double r, int samples = 4096) {
  double total = 0.0;
  auto at = [&](int i) {
    const double a = 2.0 * M_PI * i / samples;
    Vec x = c;
    x[0] += r * std::cos(a);
    x[1] += r * std::sin(a);
    return f(x);
  };
  Vec prev = at(0);
  for (int i = 1; i <= samples; ++i) {
    const Vec cur = at(i % samples);
    total += std::atan2(prev[0] * cur[1] - prev[1] * cur[0], prev.dot(cur));
    prev = cur;
  }
  return total / (2.0 * M_PI);
}

/// Degree of the Gauss map of f on a 2-sphere via the Kronecker integral
/// (1/4pi) * integral of g . (g_theta x g_phi), midpoint rule.
inline double kronecker_degree3(const VectorFieldFn& f, const Vec& c, double r, int nt = 200, int np = 400) {
  auto g = [&](double t, double p) {
    Vec x = c + r * Vec{{std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)}};
    const Vec v = f(x);
    return Eigen::Vector3d(v / v.norm());
  };
  const double dt = M_PI / nt, dp = 2.0 * M_PI / np, h = 1e-5;
  double total = 0.0;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double t = (i + 0.5) * dt, p = (j + 0.5) * dp;
      const Eigen::Vector3d gt = (g(t + h, p) - g(t - h, p)) / (2 * h);
      const Eigen::Vector3d gp = (g(t, p + h) - g(t, p - h)) / (2 * h);
      total += g(t, p).dot(gt.cross(gp)) * dt * dp;
    }
  return total / (4.0 * M_PI);
}

// ---------------------------------------------------------------------------
// integer linear algebra
// ---------------------------------------------------------------------------

inline BigInt abs_big(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }

inline BigInt gcd_big(BigInt a, BigInt b) {
  a = abs_big(a);
  b = abs_big(b);
  while (b != 0) {
    BigInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Exact determinant by Bareiss fraction-free elimination.
inline BigInt determinant(std::vector<std::vector<BigInt>> a) {
  const std::size_t n = a.size();
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

inline void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Invariant factors from determinantal divisors: d_k is the gcd of all
/// k x k minors and the k-th factor is d_k / d_(k-1).
inline std::vector<BigInt> invariant_factors_by_minors(const IntMatrix& m) {
  std::vector<BigInt> factors;
  BigInt prev = 1;
  const int r = static_cast<int>(m.rows()), c = static_cast<int>(m.cols());
  for (int k = 1; k <= std::min(r, c); ++k) {
    std::vector<std::vector<int>> rows, cols;
    std::vector<int> cur;
    combinations(r, k, 0, cur, rows);
    combinations(c, k, 0, cur, cols);
    BigInt d = 0;
    for (const auto& rs : rows)
      for (const auto& cs : cols) {
        std::vector<std::vector<BigInt>> sub(static_cast<std::size_t>(k), std::vector<BigInt>(static_cast<std::size_t>(k)));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) sub[i][j] = m(rs[i], cs[j]);
        d = gcd_big(d, determinant(sub));
      }
    if (d == 0) break;
    factors.push_back(d / prev);
    prev = d;
  }
  return factors;
}

/// Rank over the field Z/p.
inline Index rank_mod_p(std::vector<std::vector<long long>> a, long long p) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size(), cols = a[0].size();
  for (auto& row : a)
    for (auto& v : row) v = ((v % p) + p) % p;
  auto inverse = [p](long long v) {
    long long r = 1, e = p - 2, b = v;
    while (e > 0) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    const long long inv = inverse(a[rank][col]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const long long factor = a[i][col] * inv % p;
      if (factor == 0) continue;
      for (std::size_t j = col; j < cols; ++j) a[i][j] = ((a[i][j] - factor * a[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  return static_cast<Index>(rank);
}

// ---------------------------------------------------------------------------
// simplicial complexes, built independently of the library's chain code
// ---------------------------------------------------------------------------

/// faces[k] = sorted k-simplices of the closure of the mesh.
inline std::vector<std::vector<std::vector<Index>>> closure(const SimplicialMesh& mesh) {
  std::vector<std::set<std::vector<Index>>> sets(static_cast<std::size_t>(mesh.dim() + 1));
  for (const auto& s : mesh.simplices()) {
    std::vector<Index> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    const int size = static_cast<int>(v.size());
    for (int mask = 1; mask < (1 << size); ++mask) {
      std::vector<Index> face;
      for (int i = 0; i < size; ++i)
        if (mask & (1 << i)) face.push_back(v[static_cast<std::size_t>(i)]);
      sets[face.size() - 1].insert(face);
    }
  }
  std::vector<std::vector<std::vector<Index>>> out;
  for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
  return out;
}

/// Dense boundary matrix from k-faces to (k-1)-faces.
inline std::vector<std::vector<long long>> boundary(const std::vector<std::vector<std::vector<Index>>>& faces, int k) {
  const auto& lo = faces[static_cast<std::size_t>(k - 1)];
  const auto& hi = faces[static_cast<std::size_t>(k)];
  std::vector<std::vector<long long>> d(lo.size(), std::vector<long long>(hi.size(), 0));
  for (std::size_t j = 0; j < hi.size(); ++j)
    for (std::size_t drop = 0; drop < hi[j].size(); ++drop) {
      std::vector<Index> f = hi[j];
      f.erase(f.begin() + static_cast<std::ptrdiff_t>(drop));
      const auto it = std::lower_bound(lo.begin(), lo.end(), f);
      d[static_cast<std::size_t>(it - lo.begin())][j] = (drop % 2 == 0) ? 1 : -1;
    }
  return d;
}

/// Betti numbers over Q (p = 0) or over Z/p.
inline std::vector<Index> betti(const SimplicialMesh& mesh, long long p = 0) {
  const auto faces = closure(mesh);
  const int top = static_cast<int>(faces.size()) - 1;
  std::vector<Index> ranks(static_cast<std::size_t>(top + 2), 0);  // ranks[k] = rank of d_k
  for (int k = 1; k <= top; ++k) {
    const auto d = boundary(faces, k);
    // rank over Q through a large prime: boundary torsion here only involves 2
    ranks[static_cast<std::size_t>(k)] = rank_mod_p(d, p == 0 ? 2147483647LL : p);
  }
  std::vector<Index> b;
  for (int k = 0; k <= top; ++k)
    b.push_back(static_cast<Index>(faces[static_cast<std::size_t>(k)].size()) - ranks[static_cast<std::size_t>(k)] -
                ranks[static_cast<std::size_t>(k + 1)]);
  return b;
}

inline Index euler_by_counting(const SimplicialMesh& mesh) {
  const auto faces = closure(mesh);
  Index chi = 0;
  for (std::size_t k = 0; k < faces.size(); ++k) chi += (k % 2 == 0 ? 1 : -1) * static_cast<Index>(faces[k].size());
  return chi;
}

/// Number of triangles of a surface in R^3 hit by the ray p + t d, t > 0
/// (Moller-Trumbore).
inline int ray_hits(const SimplicialMesh& mesh, const Eigen::Vector3d& p, const Eigen::Vector3d& d) {
  int hits = 0;
  for (const auto& s : mesh.simplices()) {
    const Eigen::Vector3d a = mesh.vertex(s[0]), b = mesh.vertex(s[1]), c = mesh.vertex(s[2]);
    const Eigen::Vector3d e1 = b - a, e2 = c - a, q = d.cross(e2);
    const double det = e1.dot(q);
    if (std::abs(det) < 1e-14) continue;
    const Eigen::Vector3d t = p - a;
    const double u = t.dot(q) / det;
    const Eigen::Vector3d r = t.cross(e1);
    const double v = d.dot(r) / det;
    const double dist = e2.dot(r) / det;
    if (u >= 0 && v >= 0 && u + v <= 1 && dist > 0) ++hits;
  }
  return hits;
}

}  // namespace oracle
