#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/algebra/poly.hpp"
#include "vk/core/error.hpp"
#include "vk/exactla/factor.hpp"

namespace vk::algebra {

/// Nonzero ideal of O, stored as the Hermite normal form of a Z-basis:
/// an upper-triangular d x d matrix whose columns span the ideal, with
/// positive diagonal and entries right of the diagonal reduced modulo it.
class OIdeal {
 public:
  OIdeal() = default;

  static OIdeal from_generators(const NumberField& F, const std::vector<Elem>& gens) {
    std::vector<Elem> cols;
    for (const auto& g : gens) {
      if (F.is_zero(g)) continue;
      for (int k = 0; k < F.degree(); ++k) cols.push_back(F.mul(g, F.basis_element(k)));
    }
    return from_columns(F, std::move(cols));
  }

  static OIdeal principal(const NumberField& F, const Elem& a) {
    if (F.is_zero(a)) throw InvalidInput("the zero ideal is not supported");
    Int n = abs(F.norm(a));
    std::vector<Elem> cols;
    for (int k = 0; k < F.degree(); ++k) {
      cols.push_back(F.mul(a, F.basis_element(k)));
      cols.push_back(F.from_int(n));
      cols.back() = F.mul(cols.back(), F.basis_element(k));
    }
    return from_columns(F, std::move(cols));
  }

  static OIdeal rational(const NumberField& F, const Int& m) { return principal(F, F.from_int(m)); }
  static OIdeal unit(const NumberField& F) { return rational(F, 1); }

  /// Builds the HNF of the Z-span of the given vectors (must have full rank).
  static OIdeal from_columns(const NumberField& F, std::vector<Elem> cols) {
    const int d = F.degree();
    Matrix<Int> h(d, d, Int(0));
    for (int row = d - 1; row >= 0; --row) {
      for (;;) {
        std::size_t best = cols.size();
        std::size_t nonzero = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (cols[c][row] == 0) continue;
          ++nonzero;
          if (best == cols.size() || abs(cols[c][row]) < abs(cols[best][row])) best = c;
        }
        if (nonzero == 0) throw InvalidInput("generators do not span a full-rank ideal (zero ideal?)");
        if (nonzero == 1) {
          Elem piv = cols[best];
          if (piv[row] < 0)
            for (auto& x : piv) x = -x;
          for (int i = 0; i < d; ++i) h(i, row) = piv[i];
          cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(best));
          break;
        }
        const Elem piv = cols[best];
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (c == best || cols[c][row] == 0) continue;
          Int q;
          mpz_fdiv_q(q.get_mpz_t(), cols[c][row].get_mpz_t(), piv[row].get_mpz_t());
          for (int i = 0; i < d; ++i) cols[c][i] -= q * piv[i];
        }
      }
    }
    for (int j = 0; j < d; ++j)
      for (int i = j - 1; i >= 0; --i) {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), h(i, j).get_mpz_t(), h(i, i).get_mpz_t());
        if (q != 0)
          for (int k = 0; k <= i; ++k) h(k, j) -= q * h(k, i);
      }
    OIdeal I;
    I.field_ = &F;
    I.hnf_ = std::move(h);
    return I;
  }

  const NumberField& field() const { return *field_; }
  const Matrix<Int>& hnf() const { return hnf_; }

  Int norm() const {
    Int n = 1;
    for (std::size_t i = 0; i < hnf_.rows(); ++i) n *= hnf_(i, i);
    return n;
  }

  bool is_unit_ideal() const { return norm() == 1; }

  /// Canonical representative of a modulo the ideal: 0 <= x_i < h_ii.
  Elem reduce(Elem a) const {
    const int d = static_cast<int>(hnf_.rows());
    for (int i = d - 1; i >= 0; --i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), a[i].get_mpz_t(), hnf_(i, i).get_mpz_t());
      if (q != 0)
        for (int k = 0; k <= i; ++k) a[k] -= q * hnf_(k, i);
    }
    return a;
  }

  bool contains(const Elem& a) const {
    Elem r = reduce(a);
    return std::all_of(r.begin(), r.end(), [](const Int& x) { return x == 0; });
  }

  bool contains(const OIdeal& other) const {
    for (std::size_t j = 0; j < other.hnf_.cols(); ++j)
      if (!contains(other.column(j))) return false;
    return true;
  }

  Elem column(std::size_t j) const {
    Elem e(hnf_.rows());
    for (std::size_t i = 0; i < hnf_.rows(); ++i) e[i] = hnf_(i, j);
    return e;
  }

  friend OIdeal operator*(const OIdeal& a, const OIdeal& b) {
    const NumberField& F = *a.field_;
    std::vector<Elem> cols;
    const Int n = a.norm() * b.norm();
    for (std::size_t i = 0; i < a.hnf_.cols(); ++i)
      for (std::size_t j = 0; j < b.hnf_.cols(); ++j) cols.push_back(F.mul(a.column(i), b.column(j)));
    for (int k = 0; k < F.degree(); ++k) {
      Elem e = F.zero();
      e[k] = n;
      cols.push_back(e);
    }
    return from_columns(F, std::move(cols));
  }

  friend OIdeal operator+(const OIdeal& a, const OIdeal& b) {
    std::vector<Elem> cols;
    for (std::size_t j = 0; j < a.hnf_.cols(); ++j) cols.push_back(a.column(j));
    for (std::size_t j = 0; j < b.hnf_.cols(); ++j) cols.push_back(b.column(j));
    return from_columns(*a.field_, std::move(cols));
  }

  OIdeal pow(unsigned e) const {
    OIdeal r = unit(*field_);
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  friend bool operator==(const OIdeal& a, const OIdeal& b) { return a.hnf_ == b.hnf_; }
  friend bool operator!=(const OIdeal& a, const OIdeal& b) { return !(a == b); }
  /// Total order: by norm, then HNF entries row by row.
  friend bool operator<(const OIdeal& a, const OIdeal& b) {
    Int na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    return a.hnf_.data() < b.hnf_.data();
  }

  /// HNF rows joined by ';', entries by ','. For Z this is just the generator.
  std::string hnf_string() const {
    std::string s;
    for (std::size_t i = 0; i < hnf_.rows(); ++i) {
      if (i) s += ';';
      for (std::size_t j = 0; j < hnf_.cols(); ++j) {
        if (j) s += ',';
        s += hnf_(i, j).get_str();
      }
    }
    return s;
  }

  static OIdeal parse_hnf(const NumberField& F, const std::string& text) {
    std::vector<Elem> cols(F.degree(), F.zero());
    std::size_t row = 0;
    std::string cur;
    std::vector<std::string> rows;
    for (char ch : text + ";") {
      if (ch == ';') {
        rows.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (static_cast<int>(rows.size()) != F.degree()) throw InvalidInput("HNF '" + text + "' has wrong row count");
    for (const auto& r : rows) {
      std::size_t col = 0;
      std::string tok;
      for (char ch : r + ",") {
        if (ch == ',') {
          if (static_cast<int>(col) >= F.degree()) throw InvalidInput("HNF '" + text + "' has wrong column count");
          if (cols[col][row].set_str(tok, 10) != 0) throw InvalidInput("bad HNF entry '" + tok + "'");
          ++col;
          tok.clear();
        } else if (ch != ' ') {
          tok += ch;
        }
      }
      ++row;
    }
    OIdeal I = from_columns(F, cols);
    OIdeal check;
    check.field_ = &F;
    check.hnf_ = Matrix<Int>(F.degree(), F.degree(), Int(0));
    for (int i = 0; i < F.degree(); ++i)
      for (int j = 0; j < F.degree(); ++j) check.hnf_(i, j) = cols[j][i];
    if (!(check == I)) throw InvalidInput("'" + text + "' is not a reduced HNF ideal basis");
    return I;
  }

 private:
  const NumberField* field_ = nullptr;
  Matrix<Int> hnf_;
};

struct PrimeIdeal {
  OIdeal ideal;
  Int p;                 // rational prime below
  unsigned residue_degree = 1;
  unsigned ramification = 1;
  Int norm() const { return ideal.norm(); }
};

/// Primes above the rational prime p (Kummer-Dedekind on the power basis).
inline std::vector<PrimeIdeal> primes_above(const NumberField& F, const Int& p) {
  if (!F.monogenic_power_basis())
    throw ConfigError("prime decomposition needs a power integral basis; " + F.label() + " does not have one");
  if (!p.fits_ulong_p()) throw InvalidInput("prime too large: " + p.get_str());
  std::vector<PrimeIdeal> out;
  if (F.degree() == 1) {
    out.push_back({OIdeal::rational(F, p), p, 1, 1});
    return out;
  }
  for (const auto& fac : factor_mod_p(F.polynomial(), p.get_ui())) {
    Elem g = F.zero();
    for (std::size_t k = 0; k < fac.factor.size(); ++k) {
      Elem t = F.theta_power(static_cast<int>(k));
      for (auto& x : t) x *= static_cast<unsigned long>(fac.factor[k]);
      g = F.add(g, t);
    }
    OIdeal P = OIdeal::from_generators(F, {F.from_int(p), g});
    out.push_back({P, p, static_cast<unsigned>(fac.factor.size() - 1), fac.exponent});
  }
  std::sort(out.begin(), out.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) { return a.ideal < b.ideal; });
  return out;
}

struct IdealFactor {
  PrimeIdeal prime;
  unsigned exponent = 0;
};

/// Prime factorization, sorted by (norm, HNF). Multiplies back to the input.
inline std::vector<IdealFactor> ideal_factor(const OIdeal& I) {
  const NumberField& F = I.field();
  std::vector<IdealFactor> out;
  const Int n = I.norm();
  if (n == 0) throw InvalidInput("zero ideal");
  auto fac = exactla::factor_integer(n, std::chrono::seconds(10));
  if (!fac.complete()) throw BudgetExceeded("could not factor the norm " + n.get_str());
  for (const auto& [p, e] : fac.primes) {
    (void)e;
    for (auto& P : primes_above(F, p)) {
      unsigned v = 0;
      OIdeal Pk = P.ideal;
      while (Pk.contains(I)) {
        ++v;
        Pk = Pk * P.ideal;
      }
      if (v > 0) out.push_back({P, v});
    }
  }
  OIdeal prod = OIdeal::unit(F);
  for (const auto& f : out) prod = prod * f.prime.ideal.pow(f.exponent);
  if (!(prod == I)) throw InternalError("ideal factorization does not multiply back");
  return out;
}

inline bool is_prime_ideal(const OIdeal& I) {
  if (I.is_unit_ideal()) return false;
  auto f = ideal_factor(I);
  return f.size() == 1 && f[0].exponent == 1;
}

/// All ideals with norm in [lo, hi], sorted by (norm, HNF).
inline std::vector<OIdeal> ideals_of_norm_between(const NumberField& F, const Int& lo, const Int& hi) {
  std::vector<OIdeal> out;
  if (hi < 1 || hi < lo) return out;
  std::vector<PrimeIdeal> primes;
  for (Int p = 2; p <= hi; ++p) {
    if (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) continue;
    for (auto& P : primes_above(F, p))
      if (P.norm() <= hi) primes.push_back(P);
  }
  std::sort(primes.begin(), primes.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) { return a.ideal < b.ideal; });
  // Depth-first over nondecreasing prime indices.
  struct Frame {
    OIdeal ideal;
    Int norm;
    std::size_t next;
  };
  std::vector<Frame> stack{{OIdeal::unit(F), Int(1), 0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.norm >= lo) out.push_back(f.ideal);
    for (std::size_t i = f.next; i < primes.size(); ++i) {
      Int nn = f.norm * primes[i].norm();
      if (nn > hi) continue;
      stack.push_back({f.ideal * primes[i].ideal, nn, i});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace vk::algebra
