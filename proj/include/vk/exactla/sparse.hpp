#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vk/core/error.hpp"

namespace vk::exactla {

using Int = mpz_class;

struct Triple {
  std::size_t row = 0;
  std::size_t col = 0;
  Int value;
};

/// Exact sparse integer matrix, stored by columns with sorted row indices.
/// Invariants: indices in range, one entry per position, no stored zeros.
class SparseIntMatrix {
 public:
  using Entry = std::pair<std::uint32_t, Int>;
  using Column = std::vector<Entry>;

  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), columns_(cols) {}

  /// Builds from triples; duplicate positions are summed and zeros dropped.
  static SparseIntMatrix from_triples(std::size_t rows, std::size_t cols, std::vector<Triple> triples) {
    SparseIntMatrix m(rows, cols);
    std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    for (auto& t : triples) {
      if (t.row >= rows || t.col >= cols) throw InvalidInput("triple index out of range");
      auto& col = m.columns_[t.col];
      if (!col.empty() && col.back().first == t.row)
        col.back().second += t.value;
      else
        col.emplace_back(static_cast<std::uint32_t>(t.row), std::move(t.value));
    }
    for (auto& col : m.columns_)
      col.erase(std::remove_if(col.begin(), col.end(), [](const Entry& e) { return e.second == 0; }), col.end());
    return m;
  }

  /// Replaces column `c`; entries need not be sorted, duplicates are summed.
  void set_column(std::size_t c, Column entries) {
    if (c >= cols_) throw InvalidInput("column index out of range");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Column out;
    out.reserve(entries.size());
    for (auto& e : entries) {
      if (e.first >= rows_) throw InvalidInput("row index out of range");
      if (!out.empty() && out.back().first == e.first)
        out.back().second += e.second;
      else
        out.push_back(std::move(e));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Entry& e) { return e.second == 0; }), out.end());
    columns_[c] = std::move(out);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Column& column(std::size_t c) const { return columns_[c]; }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
  }

  bool is_zero() const { return nnz() == 0; }

  Int at(std::size_t r, std::size_t c) const {
    const auto& col = columns_[c];
    auto it = std::lower_bound(col.begin(), col.end(), r,
                               [](const Entry& e, std::size_t row) { return e.first < row; });
    if (it != col.end() && it->first == r) return it->second;
    return Int(0);
  }

  std::vector<Triple> triples() const {
    std::vector<Triple> out;
    out.reserve(nnz());
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [r, v] : columns_[c]) out.push_back({r, c, v});
    return out;
  }

  SparseIntMatrix transpose() const {
    std::vector<Triple> t = triples();
    for (auto& x : t) std::swap(x.row, x.col);
    return from_triples(cols_, rows_, std::move(t));
  }

  /// Row/column permutation: entry (r, c) moves to (row_perm[r], col_perm[c]).
  SparseIntMatrix permuted(const std::vector<std::size_t>& row_perm, const std::vector<std::size_t>& col_perm) const {
    std::vector<Triple> t = triples();
    for (auto& x : t) {
      x.row = row_perm[x.row];
      x.col = col_perm[x.col];
    }
    return from_triples(rows_, cols_, std::move(t));
  }

  friend bool operator==(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.columns_ == b.columns_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Column> columns_;
};

/// Sparse product a * b.
inline SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("sparse product dimension mismatch");
  SparseIntMatrix out(a.rows(), b.cols());
  std::vector<Int> acc(a.rows());
  std::vector<std::uint32_t> touched;
  std::vector<char> mark(a.rows(), 0);
  for (std::size_t c = 0; c < b.cols(); ++c) {
    touched.clear();
    for (const auto& [k, bv] : b.column(c))
      for (const auto& [r, av] : a.column(k)) {
        if (!mark[r]) {
          mark[r] = 1;
          acc[r] = 0;
          touched.push_back(r);
        }
        acc[r] += av * bv;
      }
    SparseIntMatrix::Column col;
    for (auto r : touched) {
      mark[r] = 0;
      if (acc[r] != 0) col.emplace_back(r, acc[r]);
    }
    out.set_column(c, std::move(col));
  }
  return out;
}

/// Text format: a header line `%vk-sparse 1 <rows> <cols> <nnz>` followed by
/// one `row col value` line per entry (0-based, decimal values).
inline void write_triples(std::ostream& os, const SparseIntMatrix& m) {
  os << "%vk-sparse 1 " << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto& [r, v] : m.column(c)) os << r << ' ' << c << ' ' << v.get_str() << '\n';
}

inline SparseIntMatrix read_triples(std::istream& is) {
  std::string tag;
  int version = 0;
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(is >> tag >> version >> rows >> cols >> nnz) || tag != "%vk-sparse" || version != 1)
    throw InvalidInput("not a vk-sparse matrix stream");
  std::vector<Triple> t;
  t.reserve(nnz);
  for (std::size_t i = 0; i < nnz; ++i) {
    Triple x;
    std::string v;
    if (!(is >> x.row >> x.col >> v)) throw InvalidInput("truncated vk-sparse matrix stream");
    if (x.value.set_str(v, 10) != 0) throw InvalidInput("bad integer in vk-sparse stream: " + v);
    t.push_back(std::move(x));
  }
  return SparseIntMatrix::from_triples(rows, cols, std::move(t));
}

}  // namespace vk::exactla
