#include "topocheck/homology.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace topocheck {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
  rows_ = static_cast<Index>(init.size());
  cols_ = rows_ ? static_cast<Index>(init.begin()->size()) : 0;
  data_.reserve(static_cast<std::size_t>(rows_ * cols_));
  for (const auto& row : init) {
    if (static_cast<Index>(row.size()) != cols_) throw PreconditionError("IntMatrix: ragged initializer");
    for (long long v : row) data_.emplace_back(v);
  }
}

void SparseIntMatrix::set(Index r, Index c, BigInt v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw PreconditionError("SparseIntMatrix::set out of range");
  auto& col = columns_[static_cast<std::size_t>(c)];
  auto it = std::lower_bound(col.begin(), col.end(), r, [](const Entry& e, Index row) { return e.row < row; });
  if (it != col.end() && it->row == r) {
    if (v == 0)
      col.erase(it);
    else
      it->value = std::move(v);
  } else if (v != 0) {
    col.insert(it, Entry{r, std::move(v)});
  }
}

BigInt SparseIntMatrix::get(Index r, Index c) const {
  const auto& col = columns_[static_cast<std::size_t>(c)];
  auto it = std::lower_bound(col.begin(), col.end(), r, [](const Entry& e, Index row) { return e.row < row; });
  return (it != col.end() && it->row == r) ? it->value : BigInt(0);
}

std::size_t SparseIntMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c.size();
  return n;
}

IntMatrix SparseIntMatrix::to_dense() const {
  IntMatrix d(rows_, cols_);
  for (Index c = 0; c < cols_; ++c)
    for (const Entry& e : column(c)) d(e.row, c) = e.value;
  return d;
}

SparseIntMatrix SparseIntMatrix::from_dense(const IntMatrix& m) {
  SparseIntMatrix s(m.rows(), m.cols());
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != 0) s.columns_[static_cast<std::size_t>(c)].push_back(Entry{r, m(r, c)});
  return s;
}

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols() != b.rows()) throw PreconditionError("multiply: shape mismatch");
  SparseIntMatrix out(a.rows(), b.cols());
  for (Index c = 0; c < b.cols(); ++c) {
    std::map<Index, BigInt> acc;
    for (const auto& eb : b.column(c))
      for (const auto& ea : a.column(eb.row)) acc[ea.row] += ea.value * eb.value;
    for (auto& [r, v] : acc)
      if (v != 0) out.set(r, c, std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

namespace {

using boost::multiprecision::abs;

void normalize_factors(std::vector<BigInt>& f) {
  // Diagonal entries of the reduced form already divide one another; sort for
  // a canonical listing.
  std::sort(f.begin(), f.end());
}

}  // namespace

SmithResult smith_normal_form(const IntMatrix& input) {
  IntMatrix a = input;
  const Index rows = a.rows(), cols = a.cols();
  SmithResult out;

  auto swap_rows = [&](Index i, Index j) {
    if (i == j) return;
    for (Index c = 0; c < cols; ++c) std::swap(a(i, c), a(j, c));
  };
  auto swap_cols = [&](Index i, Index j) {
    if (i == j) return;
    for (Index r = 0; r < rows; ++r) std::swap(a(r, i), a(r, j));
  };

  for (Index t = 0; t < std::min(rows, cols); ++t) {
    // smallest nonzero magnitude in the trailing block
    Index pr = -1, pc = -1;
    for (Index r = t; r < rows; ++r)
      for (Index c = t; c < cols; ++c)
        if (a(r, c) != 0 && (pr < 0 || abs(a(r, c)) < abs(a(pr, pc)))) {
          pr = r;
          pc = c;
        }
    if (pr < 0) break;
    swap_rows(t, pr);
    swap_cols(t, pc);

    while (true) {
      bool clean = true;
      for (Index r = t + 1; r < rows; ++r) {
        if (a(r, t) == 0) continue;
        const BigInt q = a(r, t) / a(t, t);
        for (Index c = t; c < cols; ++c) a(r, c) -= q * a(t, c);
        if (a(r, t) != 0) clean = false;
      }
      for (Index c = t + 1; c < cols; ++c) {
        if (a(t, c) == 0) continue;
        const BigInt q = a(t, c) / a(t, t);
        for (Index r = t; r < rows; ++r) a(r, c) -= q * a(r, t);
        if (a(t, c) != 0) clean = false;
      }
      if (!clean) {
        // a remainder survived: move the smallest one into the pivot slot
        Index br = t, bc = t;
        for (Index r = t + 1; r < rows; ++r)
          if (a(r, t) != 0 && abs(a(r, t)) < abs(a(br, bc))) {
            br = r;
            bc = t;
          }
        for (Index c = t + 1; c < cols; ++c)
          if (a(t, c) != 0 && abs(a(t, c)) < abs(a(br, bc))) {
            br = t;
            bc = c;
          }
        swap_rows(t, br);
        swap_cols(t, bc);
        continue;
      }
      // pivot must divide the whole trailing block
      Index bad = -1;
      for (Index r = t + 1; r < rows && bad < 0; ++r)
        for (Index c = t + 1; c < cols; ++c)
          if (a(r, c) % a(t, t) != 0) {
            bad = r;
            break;
          }
      if (bad < 0) break;
      for (Index c = t; c < cols; ++c) a(t, c) += a(bad, c);
    }
    out.factors.push_back(abs(a(t, t)));
  }
  normalize_factors(out.factors);
  out.rank = static_cast<Index>(out.factors.size());
  return out;
}

SmithResult smith_normal_form(const SparseIntMatrix& m) {
  // row-wise and column-wise views of the working matrix
  std::vector<std::map<Index, BigInt>> row(static_cast<std::size_t>(m.rows()));
  std::vector<std::set<Index>> col(static_cast<std::size_t>(m.cols()));
  for (Index c = 0; c < m.cols(); ++c)
    for (const auto& e : m.column(c)) {
      row[static_cast<std::size_t>(e.row)][c] = e.value;
      col[static_cast<std::size_t>(c)].insert(e.row);
    }

  Index unit_pivots = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<Index> order;
    for (Index c = 0; c < m.cols(); ++c)
      if (!col[static_cast<std::size_t>(c)].empty()) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
      return col[static_cast<std::size_t>(x)].size() < col[static_cast<std::size_t>(y)].size();
    });
    for (Index c : order) {
      auto& rows_of_c = col[static_cast<std::size_t>(c)];
      if (rows_of_c.empty()) continue;
      Index pr = -1;
      for (Index r : rows_of_c) {
        const BigInt& v = row[static_cast<std::size_t>(r)].at(c);
        if ((v == 1 || v == -1) && (pr < 0 || row[static_cast<std::size_t>(r)].size() < row[static_cast<std::size_t>(pr)].size()))
          pr = r;
      }
      if (pr < 0) continue;
      const BigInt p = row[static_cast<std::size_t>(pr)].at(c);  // p = 1/p
      const auto pivot_row = row[static_cast<std::size_t>(pr)];
      const std::vector<Index> others(rows_of_c.begin(), rows_of_c.end());
      for (Index r : others) {
        if (r == pr) continue;
        auto& target = row[static_cast<std::size_t>(r)];
        const BigInt f = target.at(c) * p;
        for (const auto& [j, v] : pivot_row) {
          BigInt& cell = target[j];
          cell -= f * v;
          if (cell == 0) {
            target.erase(j);
            col[static_cast<std::size_t>(j)].erase(r);
          } else {
            col[static_cast<std::size_t>(j)].insert(r);
          }
        }
      }
      for (const auto& [j, v] : pivot_row) col[static_cast<std::size_t>(j)].erase(pr);
      row[static_cast<std::size_t>(pr)].clear();
      ++unit_pivots;
      progress = true;
    }
  }

  // dense core
  std::vector<Index> live_rows, live_cols;
  for (Index r = 0; r < m.rows(); ++r)
    if (!row[static_cast<std::size_t>(r)].empty()) live_rows.push_back(r);
  for (Index c = 0; c < m.cols(); ++c)
    if (!col[static_cast<std::size_t>(c)].empty()) live_cols.push_back(c);
  IntMatrix core(static_cast<Index>(live_rows.size()), static_cast<Index>(live_cols.size()));
  std::map<Index, Index> col_pos;
  for (std::size_t k = 0; k < live_cols.size(); ++k) col_pos[live_cols[k]] = static_cast<Index>(k);
  for (std::size_t i = 0; i < live_rows.size(); ++i)
    for (const auto& [j, v] : row[static_cast<std::size_t>(live_rows[i])]) core(static_cast<Index>(i), col_pos.at(j)) = v;

  SmithResult out = smith_normal_form(core);
  out.factors.insert(out.factors.begin(), static_cast<std::size_t>(unit_pivots), BigInt(1));
  normalize_factors(out.factors);
  out.rank = static_cast<Index>(out.factors.size());
  return out;
}

// ---------------------------------------------------------------------------
// chain complexes
// ---------------------------------------------------------------------------

bool ChainComplex::satisfies_chain_condition() const {
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    if (boundaries[k - 1].cols() != boundaries[k].rows()) return false;
    if (multiply(boundaries[k - 1], boundaries[k]).nonzeros() != 0) return false;
  }
  return true;
}

ChainComplex chain_complex_of(const SimplicialMesh& mesh) {
  const auto faces = all_faces(mesh);
  ChainComplex cx;
  std::vector<std::map<Simplex, Index>> index(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    cx.chain_ranks.push_back(static_cast<Index>(faces[k].size()));
    for (std::size_t i = 0; i < faces[k].size(); ++i) index[k][faces[k][i]] = static_cast<Index>(i);
  }
  cx.boundaries.emplace_back(0, cx.chain_ranks.empty() ? 0 : cx.chain_ranks[0]);
  for (std::size_t k = 1; k < faces.size(); ++k) {
    SparseIntMatrix d(cx.chain_ranks[k - 1], cx.chain_ranks[k]);
    for (std::size_t c = 0; c < faces[k].size(); ++c) {
      const Simplex& s = faces[k][c];
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        Simplex f;
        for (std::size_t q = 0; q < s.size(); ++q)
          if (q != drop) f.push_back(s[q]);
        d.set(index[k - 1].at(f), static_cast<Index>(c), BigInt((drop % 2 == 0) ? 1 : -1));
      }
    }
    cx.boundaries.push_back(std::move(d));
  }
  if (!cx.satisfies_chain_condition()) throw ChainConditionError("boundary of a boundary is not zero");
  return cx;
}

std::string HomologyGroup::to_string() const {
  std::ostringstream out;
  bool first = true;
  if (betti > 0) {
    out << "Z^" << betti;
    first = false;
  }
  for (const BigInt& t : torsion) {
    out << (first ? "" : " + ") << "Z/" << t;
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

std::vector<HomologyGroup> homology_groups(const ChainComplex& cx) {
  if (cx.boundaries.size() != cx.chain_ranks.size())
    throw PreconditionError("chain complex: one boundary map per chain group required");
  if (!cx.satisfies_chain_condition()) throw ChainConditionError("boundary of a boundary is not zero");
  const int top = cx.top_dimension();
  std::vector<SmithResult> snf;
  for (int k = 0; k <= top; ++k) snf.push_back(smith_normal_form(cx.boundaries[static_cast<std::size_t>(k)]));
  std::vector<HomologyGroup> out;
  for (int k = 0; k <= top; ++k) {
    HomologyGroup h;
    h.dimension = k;
    const Index rank_in = (k < top) ? snf[static_cast<std::size_t>(k) + 1].rank : 0;
    h.betti = cx.chain_ranks[static_cast<std::size_t>(k)] - snf[static_cast<std::size_t>(k)].rank - rank_in;
    if (k < top)
      for (const BigInt& d : snf[static_cast<std::size_t>(k) + 1].factors)
        if (d > 1) h.torsion.push_back(d);
    out.push_back(std::move(h));
  }
  return out;
}

Index euler_characteristic(const SimplicialMesh& mesh) {
  const auto faces = all_faces(mesh);
  Index chi = 0;
  for (std::size_t k = 0; k < faces.size(); ++k)
    chi += ((k % 2 == 0) ? 1 : -1) * static_cast<Index>(faces[k].size());
  return chi;
}

Index euler_characteristic(const std::vector<HomologyGroup>& groups) {
  Index chi = 0;
  for (const auto& g : groups) chi += ((g.dimension % 2 == 0) ? 1 : -1) * g.betti;
  return chi;
}

}  // namespace topocheck
