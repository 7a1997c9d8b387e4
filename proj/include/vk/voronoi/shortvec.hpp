#pragma once

// Lattice points of bounded norm for a positive definite rational Gram
// matrix: exact LLL reduction of the Gram matrix, Fincke-Pohst enumeration
// in long double with a safety margin, then exact re-evaluation.

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"

namespace vk::voronoi {

using IVec = std::vector<Int>;

inline Rat quad_form(const RatMatrix& g, const IVec& x) {
  Rat s = 0;
  const std::size_t n = g.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    Rat t = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] != 0) t += g(i, j) * x[j];
    s += t * x[i];
  }
  return s;
}

/// Throws InvalidInput naming the first non-positive leading principal minor.
inline void require_positive_definite(const RatMatrix& g, const std::string& what = "form") {
  if (auto k = first_nonpositive_minor(g))
    throw InvalidInput(what + " is not positive definite: leading principal minor " + std::to_string(k) +
                       " is not positive");
}

struct LllResult {
  RatMatrix gram;  // u^T g u
  Matrix<Int> u;   // unimodular, columns are the reduced basis
};

/// Exact LLL reduction (delta = 3/4) of a positive definite Gram matrix.
inline LllResult lll_gram(const RatMatrix& g) {
  const std::size_t n = g.rows();
  RatMatrix a = g;
  Matrix<Int> u = Matrix<Int>::identity(n);
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < n; ++r) std::swap(u(r, i), u(r, j));
    for (std::size_t r = 0; r < n; ++r) std::swap(a(r, i), a(r, j));
    for (std::size_t c = 0; c < n; ++c) std::swap(a(i, c), a(j, c));
  };
  // b_k -= q b_j
  auto reduce = [&](std::size_t k, std::size_t j, const Int& q) {
    for (std::size_t r = 0; r < n; ++r) u(r, k) -= q * u(r, j);
    for (std::size_t r = 0; r < n; ++r) a(r, k) -= q * a(r, j);
    for (std::size_t c = 0; c < n; ++c) a(k, c) -= q * a(j, c);
  };
  auto gso = [&](std::vector<std::vector<Rat>>& mu, std::vector<Rat>& bstar) {
    mu.assign(n, std::vector<Rat>(n, Rat(0)));
    bstar.assign(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        Rat s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= mu[j][k] * mu[i][k] * bstar[k];
        mu[i][j] = s / bstar[j];
      }
      Rat s = a(i, i);
      for (std::size_t k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * bstar[k];
      bstar[i] = s;
    }
  };
  std::vector<std::vector<Rat>> mu;
  std::vector<Rat> bstar;
  std::size_t k = 1;
  gso(mu, bstar);
  std::size_t guard = 0;
  while (k < n) {
    if (++guard > 100000) throw InternalError("LLL did not terminate");
    for (std::size_t j = k; j-- > 0;) {
      if (abs(mu[k][j]) * 2 > 1) {
        Rat m2 = mu[k][j] * 2 + 1;
        Int q;
        Int den2 = m2.get_den() * 2;
        mpz_fdiv_q(q.get_mpz_t(), m2.get_num_mpz_t(), den2.get_mpz_t());
        reduce(k, j, q);
        gso(mu, bstar);
      }
    }
    if (bstar[k] >= (Rat(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) {
      ++k;
    } else {
      swap_cols(k, k - 1);
      gso(mu, bstar);
      k = k > 1 ? k - 1 : 1;
    }
  }
  return {a, u};
}

struct ShortVectorOptions {
  std::size_t max_vectors = 2000000;
};

/// All nonzero x with x^T g x <= bound (both signs), in the original basis.
inline std::vector<IVec> short_vectors(const RatMatrix& g, const Rat& bound, const ShortVectorOptions& opt = {}) {
  const std::size_t n = g.rows();
  require_positive_definite(g);
  auto red = lll_gram(g);
  // Cholesky-type decomposition q_ii, q_ij of the reduced Gram (Fincke-Pohst).
  std::vector<std::vector<long double>> q(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = static_cast<long double>(red.gram(i, j).get_d());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      q[j][i] = q[i][j];
      q[i][j] = q[i][j] / q[i][i];
    }
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) q[k][l] -= q[k][i] * q[i][l];
  }
  const long double B = static_cast<long double>(bound.get_d()) * (1 + 1e-9L) + 1e-12L;
  std::vector<IVec> out;
  std::vector<long> x(n, 0);
  // Recursive enumeration from the last coordinate.
  auto rec = [&](auto&& self, int i, long double remaining) -> void {
    long double c = 0;
    for (std::size_t j = i + 1; j < n; ++j) c += q[i][j] * x[j];
    const long double rad = std::sqrt(std::max(0.0L, remaining / q[i][i]));
    const long lo = static_cast<long>(std::ceil(-c - rad - 1e-9L));
    const long hi = static_cast<long>(std::floor(-c + rad + 1e-9L));
    for (long v = lo; v <= hi; ++v) {
      x[i] = v;
      const long double t = (v + c) * (v + c) * q[i][i];
      if (t > remaining + 1e-9L * (1 + remaining)) continue;
      if (i == 0) {
        bool zero = true;
        for (auto xi : x)
          if (xi != 0) zero = false;
        if (zero) continue;
        IVec y(n);
        for (std::size_t r = 0; r < n; ++r) {
          Int s = 0;
          for (std::size_t cidx = 0; cidx < n; ++cidx)
            if (x[cidx] != 0) s += red.u(r, cidx) * x[cidx];
          y[r] = s;
        }
        if (quad_form(g, y) <= bound) {
          out.push_back(std::move(y));
          if (out.size() > opt.max_vectors) throw BudgetExceeded("short vector enumeration exceeded its budget");
        }
      } else {
        self(self, i - 1, remaining - t);
      }
    }
    x[i] = 0;
  };
  rec(rec, static_cast<int>(n) - 1, B);
  return out;
}

struct MinimalVectors {
  Rat minimum;
  std::vector<IVec> vectors;  // closed under negation, sorted
};

/// Minimum of a positive definite form on Z^n \ {0} and all vectors attaining it.
inline MinimalVectors minimal_vectors_of_gram(const RatMatrix& g) {
  require_positive_definite(g);
  auto red = lll_gram(g);
  Rat bound = red.gram(0, 0);
  for (std::size_t i = 1; i < g.rows(); ++i)
    if (red.gram(i, i) < bound) bound = red.gram(i, i);
  auto vs = short_vectors(g, bound);
  MinimalVectors mv;
  bool first = true;
  for (auto& v : vs) {
    Rat val = quad_form(g, v);
    if (first || val < mv.minimum) {
      mv.minimum = val;
      mv.vectors.clear();
      first = false;
    }
    if (val == mv.minimum) mv.vectors.push_back(std::move(v));
  }
  std::sort(mv.vectors.begin(), mv.vectors.end());
  return mv;
}

}  // namespace vk::voronoi
