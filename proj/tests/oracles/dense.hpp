#pragma once

// Independent dense reference implementations used only by the tests.
// Deliberately naive: textbook algorithms on full matrices.

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Z = mpz_class;
using Q = mpq_class;
using ZMat = std::vector<std::vector<Z>>;

inline ZMat zeros(std::size_t r, std::size_t c) { return ZMat(r, std::vector<Z>(c, Z(0))); }

/// Rank over F_p by plain Gaussian elimination.
inline std::size_t rank_mod_p(const ZMat& m, std::uint64_t p) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::vector<std::vector<long long>> a(rows, std::vector<long long>(cols));
  const long long pp = static_cast<long long>(p);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      Z r;
      mpz_fdiv_r_ui(r.get_mpz_t(), m[i][j].get_mpz_t(), p);
      a[i][j] = r.get_si();
    }
  auto power = [&](long long b, long long e) {
    __int128 res = 1, x = b % pp;
    while (e) {
      if (e & 1) res = res * x % pp;
      x = x * x % pp;
      e >>= 1;
    }
    return static_cast<long long>(res);
  };
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    long long inv = power(a[rank][c], pp - 2);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank || a[i][c] == 0) continue;
      long long f = static_cast<long long>(static_cast<__int128>(a[i][c]) * inv % pp);
      for (std::size_t j = 0; j < cols; ++j)
        a[i][j] = static_cast<long long>(((a[i][j] - static_cast<__int128>(f) * a[rank][j]) % pp + pp) % pp);
    }
    ++rank;
  }
  return rank;
}

struct Snf {
  std::size_t rank = 0;
  std::vector<Z> diagonal;  // full chain including 1s
};

/// Textbook Smith normal form: Euclid on pivot row and column, then force
/// the pivot to divide the remaining block by adding offending rows.
inline Snf smith(ZMat a) {
  Snf out;
  if (a.empty()) return out;
  const std::size_t rows = a.size(), cols = a[0].size();
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows && pr == rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0) {
          pr = i;
          pc = j;
          break;
        }
    if (pr == rows) break;
    std::swap(a[t], a[pr]);
    for (auto& row : a) std::swap(row[t], row[pc]);
    for (;;) {
      bool changed = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        while (a[i][t] != 0) {
          Z q;
          mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
          for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
          if (a[i][t] != 0) std::swap(a[i], a[t]);
          changed = true;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        while (a[t][j] != 0) {
          Z q;
          mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
          for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
          if (a[t][j] != 0)
            for (std::size_t i = t; i < rows; ++i) std::swap(a[i][j], a[i][t]);
          changed = true;
        }
      }
      if (changed) continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (!mpz_divisible_p(a[i][j].get_mpz_t(), a[t][t].get_mpz_t())) {
            for (std::size_t k = t; k < cols; ++k) a[t][k] += a[i][k];
            divides = false;
            break;
          }
      if (divides) break;
    }
    out.diagonal.push_back(abs(a[t][t]));
    ++out.rank;
  }
  return out;
}

/// Nontrivial invariant factors (entries > 1) of the oracle SNF.
inline std::vector<Z> torsion(const Snf& s) {
  std::vector<Z> t;
  for (const auto& d : s.diagonal)
    if (d > 1) t.push_back(d);
  return t;
}

/// Z-basis of the integer kernel of `a` (columns of the returned n x z matrix),
/// from a unimodular column reduction.
inline ZMat integer_kernel(ZMat a, std::size_t n) {
  const std::size_t rows = a.size();
  ZMat u = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  auto col_op = [&](std::size_t dst, std::size_t src, const Z& q) {
    for (std::size_t i = 0; i < rows; ++i) a[i][dst] -= q * a[i][src];
    for (std::size_t i = 0; i < n; ++i) u[i][dst] -= q * u[i][src];
  };
  auto col_swap = [&](std::size_t x, std::size_t y) {
    for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][x], a[i][y]);
    for (std::size_t i = 0; i < n; ++i) std::swap(u[i][x], u[i][y]);
  };
  std::size_t pos = 0;
  for (std::size_t r = 0; r < rows && pos < n; ++r) {
    for (;;) {
      std::size_t best = n;
      for (std::size_t c = pos; c < n; ++c)
        if (a[r][c] != 0 && (best == n || abs(a[r][c]) < abs(a[r][best]))) best = c;
      if (best == n) break;
      col_swap(pos, best);
      bool done = true;
      for (std::size_t c = pos + 1; c < n; ++c) {
        if (a[r][c] == 0) continue;
        Z q;
        mpz_fdiv_q(q.get_mpz_t(), a[r][c].get_mpz_t(), a[r][pos].get_mpz_t());
        col_op(c, pos, q);
        if (a[r][c] != 0) done = false;
      }
      if (done) {
        ++pos;
        break;
      }
    }
  }
  ZMat k = zeros(n, n - pos);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = pos; c < n; ++c) k[i][c - pos] = u[i][c];
  return k;
}

/// Solves k x = b (k full column rank, b in its column span) over Q.
inline std::vector<std::vector<Q>> solve(const ZMat& k, const ZMat& b) {
  const std::size_t n = k.size();
  const std::size_t z = n ? k[0].size() : 0;
  const std::size_t m = n ? b[0].size() : 0;
  std::vector<std::vector<Q>> aug(n, std::vector<Q>(z + m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < z; ++j) aug[i][j] = k[i][j];
    for (std::size_t j = 0; j < m; ++j) aug[i][z + j] = b[i][j];
  }
  std::size_t row = 0;
  for (std::size_t c = 0; c < z; ++c) {
    std::size_t p = row;
    while (p < n && aug[p][c] == 0) ++p;
    if (p == n) throw std::runtime_error("kernel basis not of full rank");
    std::swap(aug[p], aug[row]);
    Q inv = 1 / aug[row][c];
    for (auto& x : aug[row]) x *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || aug[i][c] == 0) continue;
      Q f = aug[i][c];
      for (std::size_t j = 0; j < z + m; ++j) aug[i][j] -= f * aug[row][j];
    }
    ++row;
  }
  for (std::size_t i = z; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (aug[i][z + j] != 0) throw std::runtime_error("right-hand side not in the span");
  std::vector<std::vector<Q>> x(z, std::vector<Q>(m));
  for (std::size_t i = 0; i < z; ++i)
    for (std::size_t j = 0; j < m; ++j) x[i][j] = aug[i][z + j];
  return x;
}

struct Homology {
  std::size_t betti = 0;
  std::vector<Z> torsion;
};

/// H = ker(dk) / im(dk1) from the full presentation: a Z-basis of the
/// kernel, the image written in that basis, then its Smith form.
/// dk is r x n (given with `n` columns even when r = 0), dk1 is n x m.
inline Homology homology(const ZMat& dk, const ZMat& dk1, std::size_t n) {
  ZMat kernel = integer_kernel(dk, n);
  const std::size_t z = kernel.empty() ? 0 : kernel[0].size();
  const std::size_t m = dk1.empty() ? 0 : dk1[0].size();
  Homology h;
  if (z == 0) return h;
  ZMat pres = zeros(z, m);
  if (m > 0) {
    auto x = solve(kernel, dk1);
    for (std::size_t i = 0; i < z; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (x[i][j].get_den() != 1) throw std::runtime_error("image not integral in the kernel basis");
        pres[i][j] = x[i][j].get_num();
      }
  }
  Snf s = m > 0 ? smith(pres) : Snf{};
  h.betti = z - s.rank;
  h.torsion = torsion(s);
  return h;
}

}  // namespace oracle
