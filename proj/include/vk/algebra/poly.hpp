#pragma once

// Univariate polynomials over Z and over F_p. Coefficients are stored
// constant term first; the zero polynomial is the empty vector.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "vk/core/error.hpp"

namespace vk::algebra {

using Int = mpz_class;
using ZPoly = std::vector<Int>;

inline void trim(ZPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int degree(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }

inline ZPoly derivative(const ZPoly& f) {
  ZPoly d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<unsigned long>(i));
  trim(d);
  return d;
}

/// Polynomials over F_p for word-size p.
class FpPoly {
 public:
  using Coeffs = std::vector<std::uint64_t>;

  explicit FpPoly(std::uint64_t p) : p_(p) {}

  std::uint64_t p() const { return p_; }

  Coeffs reduce(const ZPoly& f) const {
    Coeffs g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      Int r;
      mpz_fdiv_r_ui(r.get_mpz_t(), f[i].get_mpz_t(), p_);
      g[i] = r.get_ui();
    }
    trim(g);
    return g;
  }

  static void trim(Coeffs& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p_);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % p_; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + p_ - b) % p_; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1 % p_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  std::uint64_t inv(std::uint64_t a) const {
    if (a % p_ == 0) throw InvalidInput("inverse of zero mod p");
    return pow(a, p_ - 2);
  }

  Coeffs add(const Coeffs& a, const Coeffs& b) const {
    Coeffs c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = add(c[i], b[i]);
    trim(c);
    return c;
  }
  Coeffs sub(const Coeffs& a, const Coeffs& b) const {
    Coeffs c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = sub(c[i], b[i]);
    trim(c);
    return c;
  }
  Coeffs mul(const Coeffs& a, const Coeffs& b) const {
    if (a.empty() || b.empty()) return {};
    Coeffs c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = add(c[i + j], mul(a[i], b[j]));
    trim(c);
    return c;
  }

  /// Quotient and remainder of a by b (b nonzero).
  std::pair<Coeffs, Coeffs> divmod(Coeffs a, const Coeffs& b) const {
    if (b.empty()) throw InvalidInput("polynomial division by zero");
    trim(a);
    if (a.size() < b.size()) return {{}, a};
    Coeffs q(a.size() - b.size() + 1, 0);
    const std::uint64_t lead_inv = inv(b.back());
    for (std::size_t k = a.size(); k-- >= b.size();) {
      const std::uint64_t c = mul(a[k], lead_inv);
      const std::size_t shift = k - (b.size() - 1);
      q[shift] = c;
      if (c != 0)
        for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = sub(a[shift + j], mul(c, b[j]));
      if (k == 0) break;
    }
    trim(a);
    trim(q);
    return {q, a};
  }

  Coeffs mod(const Coeffs& a, const Coeffs& b) const { return divmod(a, b).second; }

  Coeffs monic(Coeffs a) const {
    if (a.empty()) return a;
    const std::uint64_t li = inv(a.back());
    for (auto& c : a) c = mul(c, li);
    return a;
  }

  Coeffs gcd(Coeffs a, Coeffs b) const {
    trim(a);
    trim(b);
    while (!b.empty()) {
      Coeffs r = mod(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }

  /// base^e mod m, with e given as a big integer.
  Coeffs powmod(Coeffs base, Int e, const Coeffs& m) const {
    Coeffs r{1 % p_};
    r = mod(r, m);
    base = mod(base, m);
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) r = mod(mul(r, base), m);
      base = mod(mul(base, base), m);
      e >>= 1;
    }
    return r;
  }

 private:
  std::uint64_t p_;
};

struct FpFactor {
  FpPoly::Coeffs factor;  // monic irreducible
  unsigned exponent = 0;
};

namespace detail {

inline unsigned divide_out(const FpPoly& F, FpPoly::Coeffs& f, const FpPoly::Coeffs& g) {
  unsigned e = 0;
  for (;;) {
    auto [q, r] = F.divmod(f, g);
    if (!r.empty()) break;
    f = std::move(q);
    ++e;
  }
  return e;
}

/// Splits a product of distinct monic irreducibles of degree k (p odd).
inline void equal_degree_split(const FpPoly& F, const FpPoly::Coeffs& g, int k, std::vector<FpPoly::Coeffs>& out) {
  const int dg = static_cast<int>(g.size()) - 1;
  if (dg <= 0) return;
  if (dg == k) {
    out.push_back(F.monic(g));
    return;
  }
  Int pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), F.p(), static_cast<unsigned long>(k));
  const Int e = (pk - 1) / 2;
  // Deterministic sequence of trial polynomials x + a, x^2 + x + a, ...
  for (std::uint64_t a = 0;; ++a) {
    FpPoly::Coeffs t;
    if (a < F.p())
      t = {a % F.p(), 1};
    else
      t = {a % F.p(), (a / F.p()) % F.p(), 1};
    auto h = F.sub(F.powmod(t, e, g), FpPoly::Coeffs{1});
    auto d = F.gcd(g, h);
    const int dd = static_cast<int>(d.size()) - 1;
    if (dd > 0 && dd < dg) {
      equal_degree_split(F, d, k, out);
      equal_degree_split(F, F.divmod(g, d).first, k, out);
      return;
    }
  }
}

}  // namespace detail

/// Factorization of a monic polynomial of degree <= 4 over F_p into monic
/// irreducibles, sorted by (degree, coefficients).
inline std::vector<FpFactor> factor_mod_p(const ZPoly& f_int, std::uint64_t p) {
  FpPoly F(p);
  auto f = F.reduce(f_int);
  if (f.empty() || f.size() > 5) throw InvalidInput("factor_mod_p supports nonzero polynomials of degree <= 4");
  f = F.monic(f);
  std::vector<FpFactor> out;
  auto record = [&](const FpPoly::Coeffs& g) {
    unsigned e = detail::divide_out(F, f, g);
    if (e > 0) out.push_back({g, e});
  };
  const bool small = p <= 3 || p * p <= 4096;
  if (small) {
    for (std::uint64_t a = 0; a < p && f.size() > 1; ++a) record(FpPoly::Coeffs{(p - a) % p, 1});
    for (std::uint64_t b = 0; b < p && f.size() > 3; ++b)
      for (std::uint64_t a = 0; a < p && f.size() > 3; ++a) record(FpPoly::Coeffs{b, a, 1});
  } else {
    const FpPoly::Coeffs x{0, 1};
    for (int k = 1; k <= 2 && static_cast<int>(f.size()) - 1 >= 2 * k - 1; ++k) {
      Int pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(k));
      auto h = F.sub(F.powmod(x, pk, f), x);
      auto g = F.gcd(f, h);
      std::vector<FpPoly::Coeffs> parts;
      detail::equal_degree_split(F, g, k, parts);
      std::sort(parts.begin(), parts.end(), [](const auto& u, const auto& v) {
        return std::lexicographical_compare(u.rbegin(), u.rend(), v.rbegin(), v.rend());
      });
      for (const auto& g1 : parts) record(g1);
    }
  }
  if (f.size() > 1) out.push_back({f, 1});  // remaining cofactor of degree 3 or 4 is irreducible
  std::sort(out.begin(), out.end(), [](const FpFactor& a, const FpFactor& b) {
    if (a.factor.size() != b.factor.size()) return a.factor.size() < b.factor.size();
    return std::lexicographical_compare(a.factor.rbegin(), a.factor.rend(), b.factor.rbegin(), b.factor.rend());
  });
  return out;
}

}  // namespace vk::algebra
