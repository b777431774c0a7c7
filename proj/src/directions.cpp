#include "topocheck/directions.hpp"

#include <cmath>

namespace topocheck {

namespace {

constexpr double kGoldenAngle = 2.39996322972865332;  // pi * (3 - sqrt(5))

Vec fibonacci_point(double z, double phi) {
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  Vec p(3);
  p << r * std::cos(phi), r * std::sin(phi), z;
  return p;
}

}  // namespace

std::vector<Vec> direction_grid(int n, int count) {
  if (n < 1 || count < 1) throw PreconditionError("direction_grid: n >= 1 and count >= 1 required");
  std::vector<Vec> out;
  if (n == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
  } else if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * i / count;
      Vec p(2);
      p << std::cos(a), std::sin(a);
      out.push_back(p);
    }
  } else if (n == 3) {
    if (count == 1) return {fibonacci_point(1.0, 0.0)};
    for (int i = 0; i < count; ++i) out.push_back(fibonacci_point(1.0 - 2.0 * i / (count - 1), i * kGoldenAngle));
  } else {
    Rng rng(0x5eed0000ULL + static_cast<std::uint64_t>(n));
    for (int i = 0; i < count; ++i) out.push_back(rng.unit_vector(n));
  }
  return out;
}

std::vector<Vec> offset_direction_grid(int n, int count) {
  if (n == 3) {
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i)
      out.push_back(fibonacci_point(1.0 - (2.0 * i + 1.0) / count, i * kGoldenAngle + 0.5));
    return out;
  }
  if (n == 2) {
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * (i + 0.5) / count;
      Vec p(2);
      p << std::cos(a), std::sin(a);
      out.push_back(p);
    }
    return out;
  }
  return direction_grid(n, count);
}

bool inside_closed_mesh(const SimplicialMesh& mesh, const Vec& point, std::uint64_t seed) {
  const int n = mesh.ambient_dim();
  if (mesh.dim() != n - 1) throw PreconditionError("inside_closed_mesh: hypersurface mesh required");
  if (point.size() != n) throw PreconditionError("inside_closed_mesh: point dimension mismatch");
  Rng rng(seed);
  constexpr double margin = 1e-9;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Vec dir = rng.unit_vector(n);
    int crossings = 0;
    bool ambiguous = false;
    Mat a(n, n);
    for (const Simplex& s : mesh.simplices()) {
      // point + t dir = v0 + sum mu_k (v_k - v0)
      const Vec& v0 = mesh.vertex(s[0]);
      a.col(0) = dir;
      for (int k = 1; k < n; ++k) a.col(k) = v0 - mesh.vertex(s[static_cast<std::size_t>(k)]);
      const Eigen::PartialPivLU<Mat> lu(a);
      if (std::abs(lu.determinant()) < 1e-300) continue;
      const Vec sol = lu.solve(v0 - point);
      const double t = sol[0];
      const double rest = 1.0 - sol.tail(n - 1).sum();
      const double lo = std::min(sol.tail(n - 1).minCoeff(), rest);
      if (t <= -margin || lo <= -margin) continue;
      if (t < margin || lo < margin) {
        ambiguous = true;
        break;
      }
      ++crossings;
    }
    if (!ambiguous) return crossings % 2 == 1;
  }
  throw MeshError("inside_closed_mesh: no transversal ray found");
}

}  // namespace topocheck
