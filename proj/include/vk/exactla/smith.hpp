#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/exactla/domains.hpp"
#include "vk/exactla/eliminate.hpp"
#include "vk/exactla/factor.hpp"
#include "vk/exactla/rank.hpp"
#include "vk/exactla/sparse.hpp"

namespace vk::exactla {

/// Rank and nontrivial invariant factors d_1 | d_2 | ... of an integer matrix.
struct ElementaryDivisors {
  std::size_t rank = 0;
  /// Invariant factors greater than 1, in divisibility order.
  std::vector<Int> divisors;
  /// Factorization of the product of `divisors`.
  Factorization factored;

  Int torsion_order() const {
    Int t = 1;
    for (const auto& d : divisors) t *= d;
    return t;
  }

  bool chain_valid() const {
    for (std::size_t i = 0; i < divisors.size(); ++i) {
      if (divisors[i] <= 1) return false;
      if (i > 0 && !mpz_divisible_p(divisors[i].get_mpz_t(), divisors[i - 1].get_mpz_t())) return false;
    }
    return factored.value() == torsion_order();
  }

  friend bool operator==(const ElementaryDivisors& a, const ElementaryDivisors& b) {
    return a.rank == b.rank && a.divisors == b.divisors;
  }
};

struct SnfOptions {
  EliminationOptions elimination;
  /// Wall-clock budget for factoring the torsion order.
  std::chrono::duration<double> factor_budget{2.0};
};

/// Turns a list of nonzero diagonal entries into the invariant-factor chain
/// (units dropped) by repeated gcd/lcm exchange.
inline std::vector<Int> normalize_diagonal(std::vector<Int> diag) {
  std::vector<Int> d;
  for (auto& x : diag) {
    x = abs(x);
    if (x > 1) d.push_back(x);
  }
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (mpz_divisible_p(d[j].get_mpz_t(), d[i].get_mpz_t())) continue;
      Int g, l;
      mpz_gcd(g.get_mpz_t(), d[i].get_mpz_t(), d[j].get_mpz_t());
      mpz_lcm(l.get_mpz_t(), d[i].get_mpz_t(), d[j].get_mpz_t());
      d[i] = g;
      d[j] = l;
    }
  d.erase(std::remove_if(d.begin(), d.end(), [](const Int& x) { return x == 1; }), d.end());
  return d;
}

namespace detail {

template <class T>
struct DenseOps;

template <>
struct DenseOps<std::int64_t> {
  static std::int64_t absval(std::int64_t v) {
    if (v == INT64_MIN) throw Overflow();
    return v < 0 ? -v : v;
  }
  static std::int64_t quot(std::int64_t a, std::int64_t b) { return a / b; }
  static std::int64_t sub_mul(std::int64_t a, std::int64_t q, std::int64_t b) {
    return checked_sub(a, checked_mul(q, b));
  }
  static Int to_int(std::int64_t v) { return Int(static_cast<long>(v)); }
};

template <>
struct DenseOps<Int> {
  static Int absval(const Int& v) { return abs(v); }
  static Int quot(const Int& a, const Int& b) {
    Int q;
    mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
  }
  static Int sub_mul(const Int& a, const Int& q, const Int& b) { return a - q * b; }
  static Int to_int(const Int& v) { return v; }
};

/// Diagonalizes a dense row-major matrix by unimodular row and column
/// operations, always pivoting on an entry of least absolute value.
/// Returns the nonzero diagonal (not yet a divisibility chain).
template <class T>
std::vector<Int> dense_diagonalize(std::vector<T> a, std::size_t rows, std::size_t cols, const EliminationOptions& opt) {
  using Ops = DenseOps<T>;
  auto at = [&](std::size_t r, std::size_t c) -> T& { return a[r * cols + c]; };
  auto swap_rows = [&](std::size_t r1, std::size_t r2) {
    if (r1 != r2)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(r1, j), at(r2, j));
  };
  auto swap_cols = [&](std::size_t c1, std::size_t c2) {
    if (c1 != c2)
      for (std::size_t i = 0; i < rows; ++i) std::swap(at(i, c1), at(i, c2));
  };
  std::vector<Int> diag;
  const std::size_t n = std::min(rows, cols);
  for (std::size_t t = 0; t < n; ++t) {
    if ((t & 15) == 0) check_deadline(opt);
    std::size_t br = rows, bc = cols;
    T best{};
    for (std::size_t r = t; r < rows; ++r)
      for (std::size_t c = t; c < cols; ++c) {
        if (at(r, c) == 0) continue;
        T v = Ops::absval(at(r, c));
        if (br == rows || v < best) {
          best = v;
          br = r;
          bc = c;
          if (best == 1) goto found;
        }
      }
  found:
    if (br == rows) break;
    swap_rows(t, br);
    swap_cols(t, bc);
    for (;;) {
      bool clean = true;
      for (std::size_t r = t + 1; r < rows; ++r) {
        if (at(r, t) == 0) continue;
        T q = Ops::quot(at(r, t), at(t, t));
        if (q != 0)
          for (std::size_t c = t; c < cols; ++c)
            if (at(t, c) != 0) at(r, c) = Ops::sub_mul(at(r, c), q, at(t, c));
        if (at(r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < cols; ++c) {
        if (at(t, c) == 0) continue;
        T q = Ops::quot(at(t, c), at(t, t));
        if (q != 0)
          for (std::size_t r = t; r < rows; ++r)
            if (at(r, t) != 0) at(r, c) = Ops::sub_mul(at(r, c), q, at(r, t));
        if (at(t, c) != 0) clean = false;
      }
      if (clean) break;
      // Bring the smallest remaining entry of row/column t to the corner.
      T m = Ops::absval(at(t, t));
      std::size_t mr = t, mc = t;
      for (std::size_t r = t + 1; r < rows; ++r)
        if (at(r, t) != 0 && Ops::absval(at(r, t)) < m) {
          m = Ops::absval(at(r, t));
          mr = r;
          mc = t;
        }
      for (std::size_t c = t + 1; c < cols; ++c)
        if (at(t, c) != 0 && Ops::absval(at(t, c)) < m) {
          m = Ops::absval(at(t, c));
          mr = t;
          mc = c;
        }
      swap_rows(t, mr);
      swap_cols(t, mc);
    }
    diag.push_back(Ops::to_int(at(t, t)));
  }
  return diag;
}

template <class Dom>
struct SparsePhase {
  std::size_t unit_pivots = 0;
  std::vector<typename SparseEliminator<Dom>::Row> core;
  std::size_t core_cols = 0;
};

template <class Dom, class Convert>
SparsePhase<Dom> sparse_unit_phase(const SparseIntMatrix& m, Convert convert, const EliminationOptions& opt) {
  SparseEliminator<Dom> elim(m.cols(), to_rows<Dom>(m, convert), Dom{}, opt);
  SparsePhase<Dom> out;
  out.unit_pivots = elim.run();
  auto [core, k] = elim.core();
  out.core = std::move(core);
  out.core_cols = k;
  return out;
}

template <class T, class Row>
std::vector<T> densify(const std::vector<Row>& core, std::size_t k, const EliminationOptions& opt) {
  const double cells = static_cast<double>(core.size()) * static_cast<double>(k);
  if (cells > static_cast<double>(opt.max_dense_cells))
    throw BudgetExceeded("reduced core " + std::to_string(core.size()) + " x " + std::to_string(k) +
                         " exceeds the dense endgame budget of " + std::to_string(opt.max_dense_cells) + " cells");
  std::vector<T> a(core.size() * k, T(0));
  for (std::size_t r = 0; r < core.size(); ++r)
    for (const auto& e : core[r]) a[r * k + e.col] = e.val;
  return a;
}

}  // namespace detail

/// Smith normal form: sparse elimination of +-1 pivots, then a dense
/// diagonalization of the reduced core. Works in int64 while possible and
/// restarts in arbitrary precision on overflow. Deterministic.
inline ElementaryDivisors smith_normal_form(const SparseIntMatrix& m, const SnfOptions& opt = {}) {
  const auto& eo = opt.elimination;
  std::vector<Int> diag;
  std::size_t units = 0;
  bool done = false;
  bool fits = true;
  for (std::size_t c = 0; c < m.cols() && fits; ++c)
    for (const auto& e : m.column(c))
      if (!e.second.fits_slong_p()) {
        fits = false;
        break;
      }
  if (fits) {
    try {
      auto phase = detail::sparse_unit_phase<Int64UnitDomain>(
          m, [](const Int& v) { return static_cast<std::int64_t>(v.get_si()); }, eo);
      units = phase.unit_pivots;
      auto dense = detail::densify<std::int64_t>(phase.core, phase.core_cols, eo);
      try {
        diag = detail::dense_diagonalize<std::int64_t>(std::move(dense), phase.core.size(), phase.core_cols, eo);
      } catch (const Overflow&) {
        auto big = detail::densify<Int>(phase.core, phase.core_cols, eo);
        diag = detail::dense_diagonalize<Int>(std::move(big), phase.core.size(), phase.core_cols, eo);
      }
      done = true;
    } catch (const Overflow&) {
      done = false;
    }
  }
  if (!done) {
    auto phase = detail::sparse_unit_phase<MpzUnitDomain>(m, [](const Int& v) { return v; }, eo);
    units = phase.unit_pivots;
    auto dense = detail::densify<Int>(phase.core, phase.core_cols, eo);
    diag = detail::dense_diagonalize<Int>(std::move(dense), phase.core.size(), phase.core_cols, eo);
  }
  ElementaryDivisors out;
  out.rank = units + diag.size();
  out.divisors = normalize_diagonal(std::move(diag));
  out.factored = factor_integer(out.torsion_order(), opt.factor_budget);
  return out;
}

/// Factored torsion of a divisor list within a time budget.
inline Factorization factor_torsion(const ElementaryDivisors& ed, std::chrono::duration<double> budget) {
  return factor_integer(ed.torsion_order(), budget);
}

}  // namespace vk::exactla
