#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "topocheck/common.hpp"
#include "topocheck/mesh.hpp"

namespace topocheck {

using BigInt = boost::multiprecision::cpp_int;

/// Dense integer matrix with arbitrary-precision entries.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> init);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  BigInt& operator()(Index r, Index c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  const BigInt& operator()(Index r, Index c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<BigInt> data_;
};

/// Column-oriented sparse integer matrix.
class SparseIntMatrix {
 public:
  struct Entry {
    Index row;
    BigInt value;
  };

  SparseIntMatrix() = default;
  SparseIntMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), columns_(static_cast<std::size_t>(cols)) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  /// Entries of one column, sorted by row.
  const std::vector<Entry>& column(Index c) const { return columns_[static_cast<std::size_t>(c)]; }
  void set(Index r, Index c, BigInt v);
  BigInt get(Index r, Index c) const;
  std::size_t nonzeros() const;

  IntMatrix to_dense() const;
  static SparseIntMatrix from_dense(const IntMatrix& m);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::vector<Entry>> columns_;
};

/// A * B; throws PreconditionError on shape mismatch.
SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b);

struct SmithResult {
  /// Invariant factors d1 | d2 | ... | dr, all positive.
  std::vector<BigInt> factors;
  Index rank = 0;
};

/// Smith normal form by unimodular row/column operations with a
/// minimum-absolute-value pivot at every step.
SmithResult smith_normal_form(const IntMatrix& m);

/// Sparse variant: unit pivots are eliminated first (Schur complement, which
/// only contributes factors equal to 1), the remaining core goes through the
/// dense routine.
SmithResult smith_normal_form(const SparseIntMatrix& m);

/// boundaries[k] is the boundary map from k-chains to (k-1)-chains; the
/// 0-th map is the zero map into the trivial group.
struct ChainComplex {
  std::vector<Index> chain_ranks;
  std::vector<SparseIntMatrix> boundaries;

  int top_dimension() const { return static_cast<int>(chain_ranks.size()) - 1; }
  /// True when every composite of consecutive boundary maps vanishes.
  bool satisfies_chain_condition() const;
};

class ChainConditionError : public Error {
 public:
  using Error::Error;
};

/// Simplicial chain complex of the mesh with alternating-sign incidences.
/// Verifies the chain condition before returning.
ChainComplex chain_complex_of(const SimplicialMesh& mesh);

struct HomologyGroup {
  int dimension = 0;
  Index betti = 0;
  std::vector<BigInt> torsion;  // each >= 2, each divides the next

  std::string to_string() const;  // e.g. "Z^1 + Z/2"
};

/// Unreduced integral homology H_0 .. H_top.
std::vector<HomologyGroup> homology_groups(const ChainComplex& complex);

/// Alternating count of simplices of every dimension.
Index euler_characteristic(const SimplicialMesh& mesh);

/// Alternating sum of Betti numbers.
Index euler_characteristic(const std::vector<HomologyGroup>& groups);

}  // namespace topocheck
