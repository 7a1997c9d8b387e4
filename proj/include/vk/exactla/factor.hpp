#pragma once

// Integer factorization for torsion orders: trial division, perfect powers,
// then Pollard-Brent rho under a wall-clock budget.

#include <gmpxx.h>

#include <chrono>
#include <map>
#include <vector>

namespace vk::exactla {

struct Factorization {
  std::map<mpz_class, unsigned> primes;
  /// Composite cofactors that could not be split within the budget.
  std::vector<mpz_class> residuals;

  /// Product of everything reported; equals the input exactly.
  mpz_class value() const {
    mpz_class v = 1;
    for (const auto& [p, e] : primes) {
      mpz_class pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
      v *= pe;
    }
    for (const auto& r : residuals) v *= r;
    return v;
  }
  bool complete() const { return residuals.empty(); }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline bool is_probable_prime(const mpz_class& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

/// One Pollard-Brent run with polynomial x^2 + c; returns a proper factor or 0.
inline mpz_class brent(const mpz_class& n, unsigned long c, Clock::time_point deadline) {
  mpz_class y = 2, x, ys, q = 1, g = 1, t;
  const unsigned long m = 128;
  unsigned long r = 1;
  auto f = [&](mpz_class& v) {
    v = v * v + c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) f(y);
    unsigned long k = 0;
    while (k < r && g == 1) {
      if (Clock::now() > deadline) return 0;
      ys = y;
      for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
        f(y);
        t = x - y;
        q = q * abs(t);
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += m;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      f(ys);
      t = x - ys;
      mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g == n ? mpz_class(0) : g;
}

inline void split(const mpz_class& n, Factorization& out, Clock::time_point deadline) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    ++out.primes[n];
    return;
  }
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    for (unsigned long k = 2;; ++k) {
      mpz_class root;
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
        Factorization sub;
        split(root, sub, deadline);
        for (const auto& [p, e] : sub.primes) out.primes[p] += e * static_cast<unsigned>(k);
        for (const auto& r : sub.residuals) {
          mpz_class rk;
          mpz_pow_ui(rk.get_mpz_t(), r.get_mpz_t(), k);
          out.residuals.push_back(rk);
        }
        return;
      }
      if (root < 2) break;
    }
  }
  for (unsigned long c = 1; c < 64; ++c) {
    if (Clock::now() > deadline) break;
    mpz_class d = brent(n, c, deadline);
    if (d != 0) {
      split(d, out, deadline);
      split(n / d, out, deadline);
      return;
    }
  }
  out.residuals.push_back(n);
}

}  // namespace detail

/// Factors |n| (n != 0). Anything not split before the budget runs out is
/// returned as a residual; the product of the result always equals |n|.
inline Factorization factor_integer(mpz_class n, std::chrono::duration<double> budget) {
  Factorization out;
  n = abs(n);
  if (n == 0) return out;
  const auto deadline = detail::Clock::now() + std::chrono::duration_cast<detail::Clock::duration>(budget);
  for (unsigned long p = 2; p < 10000 && n > 1; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_class pp = p;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        n /= p;
        ++out.primes[pp];
      }
    }
  }
  detail::split(n, out, deadline);
  return out;
}

}  // namespace vk::exactla
