#pragma once

// Dedekind zeta values at integers s >= 2 through L-function factorizations:
//   riemann            zeta(s)
//   kronecker:D        zeta(s) L(s, chi_D)           (imaginary quadratic, D the discriminant)
//   cyclotomic:q       zeta(s) prod_{chi != 1 mod q} L(s, chi)   (q prime)
//   thetadiff:A:Q1:Q2  zeta(s) L(s, rho), rho the 2-dimensional representation
//                      attached to (theta_Q1 - theta_Q2)/2 of level A
// Dirichlet L-values use Hurwitz zeta by Euler-Maclaurin; the 2-dimensional
// L-value uses the rapidly convergent incomplete-gamma expansion of its
// completed L-function. Every value carries an error bound.

#include <gmpxx.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/core/error.hpp"

namespace vk::algebra {

using Real = boost::multiprecision::cpp_bin_float_50;

struct ZetaValue {
  Real value;
  /// Rigorous bound on |computed - true| (truncation plus a rounding allowance).
  double error_bound = 0;
};

struct ZetaOptions {
  /// Largest truncation point tried before giving up.
  long max_terms = 200000;
};

namespace zeta_detail {

inline Real pi() { return boost::math::constants::pi<Real>(); }

inline double target_error(int digits) { return std::pow(10.0, -digits) / 4; }

/// Hurwitz zeta(s, x) for integer s >= 2 and 0 < x <= 1.
inline ZetaValue hurwitz(int s, const Real& x, int digits, const ZetaOptions& opt) {
  const int M = 20;
  const Real two_pi = 2 * pi();
  for (long N = 16;; N *= 2) {
    if (N > opt.max_terms)
      throw AccuracyError("Hurwitz zeta did not reach " + std::to_string(digits) + " digits", 1.0);
    Real sum = 0;
    for (long k = 0; k < N; ++k) sum += pow(Real(k) + x, -s);
    const Real a = Real(N) + x;
    sum += pow(a, 1 - s) / (s - 1) + pow(a, -s) / 2;
    Real rising = s;  // (s)_{2j-1}
    Real apow = pow(a, -s - 1);
    Real fact = 2;  // (2j)!
    for (int j = 1; j <= M; ++j) {
      sum += boost::math::bernoulli_b2n<Real>(j) / fact * rising * apow;
      rising *= Real(s + 2 * j - 1) * Real(s + 2 * j);
      apow /= a * a;
      fact *= Real(2 * j + 1) * Real(2 * j + 2);
    }
    // Remainder bound 4 (s)_{2M} / ((2 pi)^{2M} (s + 2M - 1) a^{s + 2M - 1}).
    Real r = 4;
    for (int k = 0; k < 2 * M; ++k) r *= Real(s + k);
    r /= pow(two_pi, 2 * M) * Real(s + 2 * M - 1) * pow(a, s + 2 * M - 1);
    const double bound = static_cast<double>(r) + 1e-45 * N;
    if (bound < target_error(digits)) return {sum, bound};
  }
}

inline int kronecker(long D, long n) {
  mpz_class d(D);
  return mpz_kronecker_si(d.get_mpz_t(), n);
}

/// L(s, chi) for a real character given by its values on 1..q.
inline ZetaValue dirichlet_real(int s, const std::vector<int>& chi, int digits, const ZetaOptions& opt) {
  const long q = static_cast<long>(chi.size());
  Real sum = 0;
  double err = 0;
  for (long a = 1; a <= q; ++a) {
    if (chi[a - 1] == 0) continue;
    auto h = hurwitz(s, Real(a) / q, digits + 3, opt);
    sum += chi[a - 1] * h.value;
    err += h.error_bound;
  }
  const Real scale = pow(Real(q), -s);
  return {sum * scale, err * static_cast<double>(scale)};
}

/// Product of L(s, chi) over the nontrivial characters modulo the prime q.
inline ZetaValue cyclotomic_product(int s, long q, int digits, const ZetaOptions& opt) {
  // Primitive root g modulo q.
  long g = 2;
  for (;; ++g) {
    long x = 1, ord = 0;
    do {
      x = x * g % q;
      ++ord;
    } while (x != 1);
    if (ord == q - 1) break;
  }
  std::vector<long> dlog(q, -1);
  for (long k = 0, x = 1; k < q - 1; ++k, x = x * g % q) dlog[x] = k;
  std::vector<ZetaValue> hz(q);
  double herr = 0;
  for (long a = 1; a < q; ++a) {
    hz[a] = hurwitz(s, Real(a) / q, digits + 4, opt);
    herr += hz[a].error_bound;
  }
  const Real scale = pow(Real(q), -s);
  Real prod_re = 1, prod_im = 0;
  double rel_err = 0;
  for (long j = 1; j < q - 1; ++j) {
    Real re = 0, im = 0;
    for (long a = 1; a < q; ++a) {
      const Real ang = 2 * pi() * Real(j * dlog[a]) / Real(q - 1);
      re += cos(ang) * hz[a].value;
      im += sin(ang) * hz[a].value;
    }
    re *= scale;
    im *= scale;
    const Real nre = prod_re * re - prod_im * im;
    const Real nim = prod_re * im + prod_im * re;
    prod_re = nre;
    prod_im = nim;
    // |L| >= 1/2 for s >= 2, so absolute errors herr*scale give relative 2*herr*scale.
    rel_err += 2 * herr * static_cast<double>(scale);
  }
  const double bound = static_cast<double>(abs(prod_re)) * rel_err * 1.01 + 1e-40;
  return {prod_re, bound};
}

/// Number of representations of every n <= N by a x^2 + b x y + c y^2 (positive definite).
inline std::vector<long> representation_counts(long a, long b, long c, long N) {
  std::vector<long> r(N + 1, 0);
  const long disc = 4 * a * c - b * b;
  const long ymax = static_cast<long>(std::sqrt(4.0 * a * N / disc)) + 1;
  for (long y = -ymax; y <= ymax; ++y) {
    const long xmax = static_cast<long>(std::sqrt(4.0 * c * N / disc)) + std::abs(b * y) / (2 * a) + 2;
    for (long x = -xmax; x <= xmax; ++x) {
      const long v = a * x * x + b * x * y + c * y * y;
      if (v >= 0 && v <= N) ++r[v];
    }
  }
  return r;
}

/// Gamma(a, x) for integer a and x > 0.
inline Real upper_gamma(int a, const Real& x) {
  if (a >= 1) {
    Real term = 1, sum = 0;
    for (int k = 0; k < a; ++k) {
      sum += term;
      term *= x / (k + 1);
    }
    return boost::math::factorial<Real>(static_cast<unsigned>(a - 1)) * exp(-x) * sum;
  }
  Real g = boost::math::expint(1, x);  // Gamma(0, x)
  for (int k = 0; k > a; --k) g = (g - pow(x, k - 1) * exp(-x)) / Real(k - 1);
  return g;
}

/// L(s, rho) for rho attached to f = (theta_Q1 - theta_Q2)/2 of level A, from
/// Lambda(s) = (sqrt(A)/2pi)^s Gamma(s) L(s) = Lambda(1 - s).
inline ZetaValue theta_difference_L(int s, long A, const std::vector<long>& q1, const std::vector<long>& q2, int digits) {
  const Real c = sqrt(Real(A)) / (2 * pi());
  // Tail: |a_n| <= n, Gamma(s, x) <= s! x^{s-1} e^{-x} (x >= 1), Gamma(1-s, x) <= x^{-s} e^{-x}.
  const double target = target_error(digits + 2);
  long N = 8;
  auto tail_bound = [&](long n0) {
    const double cd = static_cast<double>(c);
    double total = 0;
    for (long n = n0 + 1; n < n0 + 2000; ++n) {
      const double x = n / cd;
      double fact = 1;
      for (int k = 2; k <= s; ++k) fact *= k;
      const double t = n * (std::pow(cd / n, s) * fact * std::pow(x, s - 1) * std::exp(-x) +
                            std::pow(cd / n, 1 - s) * std::pow(x, -s) * std::exp(-x));
      total += t;
      if (t < total * 1e-20) break;
    }
    return total;
  };
  while (tail_bound(N) > target) N += 8;
  auto r1 = representation_counts(q1[0], q1[1], q1[2], N);
  auto r2 = representation_counts(q2[0], q2[1], q2[2], N);
  Real lambda = 0;
  for (long n = 1; n <= N; ++n) {
    const long diff = r1[n] - r2[n];
    if (diff % 2 != 0) throw ConfigError("theta difference has odd coefficients");
    const long an = diff / 2;
    if (an == 0) continue;
    const Real x = Real(n) / c;
    const Real u = c / Real(n);
    lambda += Real(an) * (pow(u, s) * upper_gamma(s, x) + pow(u, 1 - s) * upper_gamma(1 - s, x));
  }
  const Real norm = pow(c, s) * boost::math::factorial<Real>(static_cast<unsigned>(s - 1));
  const double bound = (tail_bound(N) + 1e-40) / static_cast<double>(norm);
  return {lambda / norm, bound};
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace zeta_detail

/// Riemann zeta(s), integer s >= 2.
inline ZetaValue riemann_zeta(int s, int digits = 15, const ZetaOptions& opt = {}) {
  if (s < 2) throw InvalidInput("zeta(s) needs s >= 2");
  if (digits > 30) throw AccuracyError("at most 30 digits are supported", std::pow(10.0, -30));
  return zeta_detail::hurwitz(s, Real(1), digits, opt);
}

/// zeta_F(s) for a catalog field, integer s >= 2, up to 30 digits.
inline ZetaValue dedekind_zeta(const NumberField& F, int s, int digits = 15, const ZetaOptions& opt = {}) {
  using namespace zeta_detail;
  if (s < 2) throw InvalidInput("dedekind_zeta needs s >= 2");
  if (digits > 30) throw AccuracyError("at most 30 digits are supported", std::pow(10.0, -30));
  const auto parts = split(F.record().zeta_model, ':');
  if (parts.empty()) throw ConfigError("field " + F.label() + " has no zeta model");
  const ZetaValue z = hurwitz(s, Real(1), digits + 2, opt);
  ZetaValue L{Real(1), 0};
  if (parts[0] == "riemann") {
    return z;
  } else if (parts[0] == "kronecker" && parts.size() == 2) {
    const long D = std::stol(parts[1]);
    if (Int(D) != F.discriminant()) throw ConfigError("kronecker model does not match the discriminant of " + F.label());
    std::vector<int> chi(std::labs(D));
    for (long a = 1; a <= std::labs(D); ++a) chi[a - 1] = kronecker(D, a);
    L = dirichlet_real(s, chi, digits + 2, opt);
  } else if (parts[0] == "cyclotomic" && parts.size() == 2) {
    L = cyclotomic_product(s, std::stol(parts[1]), digits + 2, opt);
  } else if (parts[0] == "thetadiff" && parts.size() == 4) {
    auto parse3 = [&](const std::string& t) {
      std::vector<long> v;
      for (auto& x : split(t, ',')) v.push_back(std::stol(x));
      if (v.size() != 3) throw ConfigError("bad quadratic form in zeta model of " + F.label());
      return v;
    };
    L = theta_difference_L(s, std::stol(parts[1]), parse3(parts[2]), parse3(parts[3]), digits + 2);
  } else {
    throw ConfigError("unknown zeta model '" + F.record().zeta_model + "' for " + F.label());
  }
  const double bound = static_cast<double>(z.value) * L.error_bound + static_cast<double>(abs(L.value)) * z.error_bound +
                       z.error_bound * L.error_bound;
  if (bound > std::pow(10.0, -digits))
    throw AccuracyError("zeta value of " + F.label() + " not accurate to " + std::to_string(digits) + " digits", bound);
  return {z.value * L.value, bound};
}

}  // namespace vk::algebra
