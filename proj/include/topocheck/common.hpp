#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace topocheck {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = std::int64_t;

// ---------------------------------------------------------------------------
// Error hierarchy. Every failure the library reports derives from Error so
// callers can catch one type; the subclasses carry the structured context.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad dimension, bad radius...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A field vanished where a Gauss map had to be evaluated.
class VanishingFieldError : public Error {
 public:
  VanishingFieldError(const std::string& what, Vec point)
      : Error(what), point_(std::move(point)) {}
  const Vec& point() const { return point_; }

 private:
  Vec point_;
};

/// The adaptive degree computation ran out of budget before settling.
class DegreeUndecidedError : public Error {
 public:
  DegreeUndecidedError(const std::string& what, double raw)
      : Error(what), raw_(raw) {}
  double raw() const { return raw_; }

 private:
  double raw_;
};

/// A non-manifold face, a broken simplex, or similar structural defect.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// The hypothesis of a theorem-backed check does not hold on the input.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, Vec witness)
      : Error(what), witness_(std::move(witness)) {}
  const Vec& witness() const { return witness_; }

 private:
  Vec witness_;
};

// ---------------------------------------------------------------------------
// Deterministic random numbers. std:: distributions are implementation
// defined, so the conversions live here to keep reports reproducible.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Vec unit_vector(int n) {
    Vec v(n);
    double norm = 0.0;
    while (norm < 1e-8) {
      for (int i = 0; i < n; ++i) v[i] = normal();
      norm = v.norm();
    }
    return v / norm;
  }

  /// Uniform sample from the closed ball of given radius in R^n.
  Vec in_ball(int n, double radius) {
    if (n == 0) return Vec(0);
    const Vec dir = unit_vector(n);
    return dir * (radius * std::pow(uniform(), 1.0 / n));
  }

 private:
  std::uint64_t state_;
};

/// Pairwise summation; the result depends only on the order of `values`,
/// never on how work was split, and error grows as O(log n).
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Axis-aligned box [lower, upper] in R^n.
struct Box {
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vec& x, double margin = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lower[i] - margin || x[i] > upper[i] + margin) return false;
    return true;
  }
  static Box cube(const Vec& center, double half_width) {
    return Box{center.array() - half_width, center.array() + half_width};
  }
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

inline int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace topocheck
