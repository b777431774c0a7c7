#include "topocheck/degree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace topocheck {

Vec gauss_map(const VectorFieldFn& f, const Vec& x) {
  const Vec v = f(x);
  const double norm = v.norm();
  if (!(norm > kVanishingNorm)) throw VanishingFieldError("field vanishes on the evaluation set", x);
  return v / norm;
}

Vec gauss_map(const FieldSpec& f, const Vec& x) { return gauss_map(f.as_function(), x); }

std::string method_name(DegreeMethod m) {
  switch (m) {
    case DegreeMethod::Sign: return "sign";
    case DegreeMethod::Winding: return "winding";
    case DegreeMethod::SolidAngle: return "solid-angle";
    case DegreeMethod::RegularValue: return "regular-value";
  }
  return "unknown";
}

PreimageCount count_preimages(const std::vector<Vec>& images, const SimplicialMesh& mesh, const Vec& value) {
  const int n = mesh.dim() + 1;
  constexpr double margin = 1e-6;
  PreimageCount out;
  Mat g(n, n);
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    const Simplex simplex = mesh.oriented_simplex(s);
    for (int k = 0; k < n; ++k) g.col(k) = images[static_cast<std::size_t>(simplex[static_cast<std::size_t>(k)])];
    const Eigen::PartialPivLU<Mat> lu(g);
    const double det = lu.determinant();
    if (std::abs(det) < 1e-300) {
      for (int k = 0; k < n; ++k)
        if ((g.col(k) - value).norm() < margin) out.near_boundary = true;
      continue;
    }
    const Vec lambda = lu.solve(value);
    const double total = lambda.sum();
    if (total <= 0.0) continue;
    const double lo = lambda.minCoeff() / total;
    if (lo > margin) {
      out.signed_count += sign_of(det);
      ++out.unsigned_count;
    } else if (lo > -margin) {
      out.near_boundary = true;
    }
  }
  return out;
}

namespace {

// Preimage counting only needs a nonvanishing piecewise-linear image: pairwise
// vertex images at most a right angle apart keep every convex combination
// away from zero.
constexpr double kCountingGate = M_PI / 2 + 1e-9;

double image_angle(const Vec& a, const Vec& b) {
  // robust for tiny and near-antipodal angles
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

/// Mesh plus Gauss images, refined by conforming edge bisection.
class AdaptiveImage {
 public:
  AdaptiveImage(const VectorFieldFn& f, const SimplicialMesh& mesh) : f_(f), dim_(mesh.dim()) {
    verts_ = mesh.vertices();
    imgs_.reserve(verts_.size());
    for (const Vec& v : verts_) imgs_.push_back(gauss_map(f_, v));
    for (std::size_t s = 0; s < mesh.simplex_count(); ++s) simps_.push_back(mesh.oriented_simplex(s));
  }

  /// Split every simplex along its edges whose image exceeds `threshold`.
  /// Returns false when nothing needed splitting.
  bool refine(double threshold) {
    marked_.clear();
    for (const Simplex& s : simps_)
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
          const auto key = edge_key(s[i], s[j]);
          if (!marked_.contains(key) && image_angle(img(s[i]), img(s[j])) > threshold) marked_.insert(key);
        }
    if (marked_.empty()) return false;
    std::vector<Simplex> next;
    next.reserve(simps_.size() * 2);
    for (const Simplex& s : simps_) split(s, next);
    simps_ = std::move(next);
    return true;
  }

  /// No edge image longer than `threshold`.
  bool resolved(double threshold) const {
    for (const Simplex& s : simps_)
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
          if (image_angle(img(s[i]), img(s[j])) > threshold) return false;
    return true;
  }

  SimplicialMesh mesh() const { return SimplicialMesh(static_cast<int>(verts_.front().size()), dim_, verts_, simps_); }
  const std::vector<Vec>& images() const { return imgs_; }
  std::size_t size() const { return simps_.size(); }

  double winding() const {
    std::vector<double> parts;
    parts.reserve(simps_.size());
    for (const Simplex& s : simps_) {
      const Vec& a = img(s[0]);
      const Vec& b = img(s[1]);
      parts.push_back(std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b)));
    }
    return pairwise_sum(parts) / (2.0 * M_PI);
  }

  double solid_angle() const {
    std::vector<double> parts;
    parts.reserve(simps_.size());
    Eigen::Matrix3d m;
    for (const Simplex& s : simps_) {
      const Vec& a = img(s[0]);
      const Vec& b = img(s[1]);
      const Vec& c = img(s[2]);
      m << a[0], b[0], c[0], a[1], b[1], c[1], a[2], b[2], c[2];
      parts.push_back(2.0 * std::atan2(m.determinant(), 1.0 + a.dot(b) + b.dot(c) + c.dot(a)));
    }
    return pairwise_sum(parts) / (4.0 * M_PI);
  }

 private:
  using EdgeKey = std::pair<Index, Index>;
  static EdgeKey edge_key(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }
  const Vec& img(Index i) const { return imgs_[static_cast<std::size_t>(i)]; }

  Index midpoint(const EdgeKey& e) {
    auto it = midpoints_.find(e);
    if (it != midpoints_.end()) return it->second;
    const Vec p = 0.5 * (verts_[static_cast<std::size_t>(e.first)] + verts_[static_cast<std::size_t>(e.second)]);
    imgs_.push_back(gauss_map(f_, p));
    verts_.push_back(p);
    const Index id = static_cast<Index>(verts_.size()) - 1;
    midpoints_.emplace(e, id);
    return id;
  }

  // Bisect along the smallest marked edge, recursively. Choosing edges in a
  // global order makes neighbours split their shared face identically.
  void split(const Simplex& s, std::vector<Simplex>& out) {
    const EdgeKey* best = nullptr;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        auto it = marked_.find(edge_key(s[i], s[j]));
        if (it != marked_.end() && (best == nullptr || *it < *best)) {
          best = &*it;
          bi = i;
          bj = j;
        }
      }
    if (best == nullptr) {
      out.push_back(s);
      return;
    }
    const Index m = midpoint(*best);
    Simplex left = s, right = s;
    left[bj] = m;
    right[bi] = m;
    split(left, out);
    split(right, out);
  }

  VectorFieldFn f_;
  int dim_;
  std::vector<Vec> verts_;
  std::vector<Vec> imgs_;
  std::vector<Simplex> simps_;
  std::set<EdgeKey> marked_;
  std::map<EdgeKey, Index> midpoints_;
};

void check_hypersurface(const SimplicialMesh& mesh) {
  if (mesh.simplex_count() == 0) throw PreconditionError("degree: empty mesh");
  if (mesh.dim() != mesh.ambient_dim() - 1) throw PreconditionError("degree: mesh must be a hypersurface (dim = n - 1)");
  if (mesh.ambient_dim() < 2) throw PreconditionError("degree: ambient dimension must be at least 2");
  if (!mesh.is_closed()) throw PreconditionError("degree: mesh must be closed");
}

/// Regular values for n >= 4, resampled away from image simplex boundaries.
struct RegularCount {
  double mean = 0.0;
  Vec first;
  std::vector<int> counts;
};

RegularCount regular_value_counts(const std::vector<Vec>& images, const SimplicialMesh& mesh, Rng& rng, int wanted,
                                  bool signed_count) {
  const int n = mesh.ambient_dim();
  RegularCount out;
  int attempts = 0;
  while (static_cast<int>(out.counts.size()) < wanted) {
    if (++attempts > 50 * wanted) throw DegreeUndecidedError("no regular value found away from image boundaries", 0.0);
    const Vec p = rng.unit_vector(n);
    const PreimageCount c = count_preimages(images, mesh, p);
    if (c.near_boundary) continue;
    if (out.counts.empty()) out.first = p;
    out.counts.push_back(signed_count ? c.signed_count : c.unsigned_count);
  }
  std::vector<double> as_double(out.counts.begin(), out.counts.end());
  out.mean = pairwise_sum(as_double) / static_cast<double>(as_double.size());
  return out;
}

}  // namespace

DegreeResult degree(const VectorFieldFn& f, const SimplicialMesh& mesh, const DegreeConfig& config) {
  check_hypersurface(mesh);
  const int n = mesh.ambient_dim();
  AdaptiveImage work(f, mesh);
  Rng rng(config.seed);

  DegreeResult result;
  result.seed = config.seed;
  result.method = n == 2 ? DegreeMethod::Winding : n == 3 ? DegreeMethod::SolidAngle : DegreeMethod::RegularValue;

  double threshold = config.max_image_angle;
  double raw = 0.0;
  for (int depth = 0;; ++depth) {
    // resolve the image first; a coarse image can be off by whole integers
    if (depth < config.max_depth && work.size() < config.max_simplices && work.refine(threshold)) continue;
    if (n == 2) {
      raw = work.winding();
    } else if (n == 3) {
      raw = work.solid_angle();
    } else {
      const RegularCount rc = regular_value_counts(work.images(), work.mesh(), rng, config.regular_values, true);
      raw = rc.mean;
      result.regular_value = rc.first;
    }
    result.depth = depth;
    result.simplices = work.size();
    // budget ran out before the image was resolved: the sum is not trustworthy
    if (!work.resolved(n <= 3 ? config.max_image_angle : kCountingGate))
      throw DegreeUndecidedError("Gauss image not resolved within the refinement budget", raw);
    const double snapped = std::round(raw);
    if (std::abs(raw - snapped) < config.snap_tolerance) {
      result.degree = static_cast<int>(snapped);
      result.raw = raw;
      result.residual = std::abs(raw - snapped);
      return result;
    }
    if (depth >= config.max_depth || work.size() >= config.max_simplices)
      throw DegreeUndecidedError("degree estimate did not settle within the refinement budget", raw);
    threshold *= 0.5;
  }
}

DegreeResult degree(const FieldSpec& f, const SimplicialMesh& mesh, const DegreeConfig& config) {
  return degree(f.as_function(), mesh, config);
}

int mod2_degree(const std::vector<Vec>& images, const SimplicialMesh& mesh, std::uint64_t seed, int regular_values) {
  if (images.size() != mesh.vertex_count()) throw PreconditionError("mod2_degree: one image per vertex required");
  if (!mesh.is_closed()) throw PreconditionError("mod2_degree: mesh must be closed");
  for (const Vec& g : images)
    if (g.size() != mesh.dim() + 1) throw PreconditionError("mod2_degree: images must lie in S^dim");
  Rng rng(seed);
  const RegularCount rc = regular_value_counts(images, mesh, rng, regular_values, false);
  const int parity = rc.counts.front() % 2;
  for (int c : rc.counts)
    if (c % 2 != parity) throw DegreeUndecidedError("preimage parity differs between regular values", rc.mean);
  return parity;
}

DegreeResult mod2_degree(const VectorFieldFn& f, const SimplicialMesh& mesh, const DegreeConfig& config) {
  if (!mesh.is_closed()) throw PreconditionError("mod2_degree: mesh must be closed");
  if (mesh.dim() + 1 != mesh.ambient_dim()) throw PreconditionError("mod2_degree: mesh must be a hypersurface");
  AdaptiveImage work(f, mesh);
  Rng rng(config.seed);
  DegreeResult result;
  result.seed = config.seed;
  result.method = DegreeMethod::RegularValue;
  double threshold = config.max_image_angle;
  for (int depth = 0;; ++depth) {
    if (depth < config.max_depth && work.size() < config.max_simplices && work.refine(threshold)) continue;
    const RegularCount rc = regular_value_counts(work.images(), work.mesh(), rng, config.regular_values, false);
    std::vector<double> parities;
    for (int c : rc.counts) parities.push_back(c % 2);
    const double raw = pairwise_sum(parities) / static_cast<double>(parities.size());
    result.depth = depth;
    result.simplices = work.size();
    result.regular_value = rc.first;
    if (!work.resolved(kCountingGate))
      throw DegreeUndecidedError("Gauss image not resolved within the refinement budget", raw);
    if (raw == 0.0 || raw == 1.0) {
      result.degree = static_cast<int>(raw);
      result.raw = raw;
      result.residual = 0.0;
      return result;
    }
    if (depth >= config.max_depth || work.size() >= config.max_simplices)
      throw DegreeUndecidedError("mod-2 degree did not settle within the refinement budget", raw);
    threshold *= 0.5;
  }
}

}  // namespace topocheck
