#pragma once

// Hermitian forms over O^n through the trace construction. A form H (n x n
// over F, H^T = c(H) for the field involution c) defines the integral
// quadratic form x -> Tr(x^* H x) on O^n = Z^N, N = n * deg F. Forms are
// stored by coordinates on a Z-basis E_1..E_D of integral Hermitian forms
// (diagonal entries in O^+, off-diagonal entries in O). A vector w in O^n
// gives the rank-one point q(w) = w w^*, whose ray coordinates are
// r_k(w) = Tr(w^* E_k w), so that <H, q(w)> = H[w].

#include <gmpxx.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/algebra/ideal.hpp"
#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"

namespace vk::voronoi {

using algebra::Elem;
using algebra::NumberField;
using IVec = std::vector<Int>;
using RVec = std::vector<Rat>;
using IMat = Matrix<Int>;
/// Field element with rational coordinates on the integral basis.
using RElem = std::vector<Rat>;
/// n x n matrix over F.
using FMat = std::vector<std::vector<RElem>>;
/// n x n matrix over O.
using OMat = std::vector<std::vector<Elem>>;

inline RVec to_rvec(const IVec& v) { return RVec(v.begin(), v.end()); }

inline Rat dot(const RVec& a, const IVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline IVec mat_vec(const IMat& m, const IVec& v) {
  IVec out(m.rows(), Int(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (v[j] != 0) out[i] += m(i, j) * v[j];
  return out;
}

/// Divides a nonzero integer vector by the gcd of its entries.
inline IVec primitive_part(IVec v) {
  Int g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1)
    for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return v;
}

/// Z-basis of {x in Z^c : a x = 0} by unimodular column reduction.
inline std::vector<IVec> integer_kernel(IMat a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  IMat u = IMat::identity(cols);
  std::size_t piv = 0;
  auto col_op = [&](std::size_t dst, std::size_t src, const Int& q) {  // col dst -= q * col src
    for (std::size_t r = 0; r < rows; ++r) a(r, dst) -= q * a(r, src);
    for (std::size_t r = 0; r < cols; ++r) u(r, dst) -= q * u(r, src);
  };
  auto col_swap = [&](std::size_t x, std::size_t y) {
    for (std::size_t r = 0; r < rows; ++r) std::swap(a(r, x), a(r, y));
    for (std::size_t r = 0; r < cols; ++r) std::swap(u(r, x), u(r, y));
  };
  for (std::size_t r = 0; r < rows && piv < cols; ++r) {
    for (;;) {
      std::size_t best = cols;
      for (std::size_t c = piv; c < cols; ++c)
        if (a(r, c) != 0 && (best == cols || abs(a(r, c)) < abs(a(r, best)))) best = c;
      if (best == cols) break;
      col_swap(piv, best);
      bool done = true;
      for (std::size_t c = piv + 1; c < cols; ++c) {
        if (a(r, c) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a(r, c).get_mpz_t(), a(r, piv).get_mpz_t());
        col_op(c, piv, q);
        if (a(r, c) != 0) done = false;
      }
      if (done) {
        ++piv;
        break;
      }
    }
  }
  std::vector<IVec> ker;
  for (std::size_t c = piv; c < cols; ++c) {
    IVec v(cols);
    for (std::size_t r = 0; r < cols; ++r) v[r] = u(r, c);
    ker.push_back(std::move(v));
  }
  return ker;
}

class FormSpace {
 public:
  FormSpace(std::shared_ptr<const NumberField> F, int n) : F_(std::move(F)), n_(n) {
    if (n_ < 1) throw InvalidInput("rank n must be positive");
    if (!F_->has_involution())
      throw ConfigError("field " + F_->label() +
                        " has mixed signature; its form space has no rational trace model and is not supported");
    if (F_->class_number() != 1)
      throw ConfigError("field " + F_->label() + " has class number " + std::to_string(F_->class_number()) +
                        "; the Voronoi enumeration supports class number 1 only");
    d_ = F_->degree();
    N_ = n_ * d_;
    for (int k = 0; k < d_; ++k) mult_.push_back(F_->mult_matrix(F_->basis_element(k)));
    conj_ = F_->conjugation_matrix();
    build_plus_basis();
    build_basis();
    for (const auto& z : F_->roots_of_unity()) units_.push_back(scalar(z));
  }

  const NumberField& field() const { return *F_; }
  std::shared_ptr<const NumberField> field_ptr() const { return F_; }
  int n() const { return n_; }
  int degree() const { return d_; }
  /// Rank of O^n as a Z-module.
  int N() const { return N_; }
  /// Real dimension of the space of forms.
  int D() const { return static_cast<int>(basis_.size()); }
  const std::vector<IMat>& basis_grams() const { return basis_; }
  const std::vector<IMat>& roots_of_unity() const { return units_; }

  // --- field arithmetic with rational coordinates ---------------------------
  RElem rmul(const RElem& a, const RElem& b) const {
    RElem c(d_, Rat(0));
    for (int k = 0; k < d_; ++k) {
      if (a[k] == 0) continue;
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
          if (b[j] != 0 && mult_[k](i, j) != 0) c[i] += a[k] * mult_[k](i, j) * b[j];
    }
    return c;
  }
  RElem radd(const RElem& a, const RElem& b) const {
    RElem c(d_);
    for (int i = 0; i < d_; ++i) c[i] = a[i] + b[i];
    return c;
  }
  RElem rconj(const RElem& a) const {
    RElem c(d_, Rat(0));
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        if (conj_(i, j) != 0) c[i] += conj_(i, j) * a[j];
    return c;
  }
  Rat rtrace(const RElem& a) const {
    Rat t = 0;
    for (int i = 0; i < d_; ++i) t += a[i] * F_->basis_traces()[i];
    return t;
  }
  RElem relem(const Elem& a) const { return RElem(a.begin(), a.end()); }
  RElem rzero() const { return RElem(d_, Rat(0)); }

  // --- vectors of O^n -------------------------------------------------------
  /// Coordinates of x_i in block i.
  Elem entry(const IVec& w, int i) const { return Elem(w.begin() + i * d_, w.begin() + (i + 1) * d_); }

  IVec from_entries(const std::vector<Elem>& xs) const {
    if (static_cast<int>(xs.size()) != n_) throw InvalidInput("vector has wrong length");
    IVec w;
    for (const auto& x : xs) w.insert(w.end(), x.begin(), x.end());
    return w;
  }

  /// Value of the integral basis form k at w.
  IVec ray(const IVec& w) const {
    IVec r(basis_.size(), Int(0));
    for (std::size_t k = 0; k < basis_.size(); ++k) r[k] = quad(basis_[k], w);
    return r;
  }

  /// Gram matrix of the form with coordinates c.
  RatMatrix gram(const RVec& c) const {
    RatMatrix g(N_, N_, Rat(0));
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      if (c[k] == 0) continue;
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          if (basis_[k](i, j) != 0) g(i, j) += c[k] * basis_[k](i, j);
    }
    return g;
  }

  Rat value(const RVec& c, const IVec& w) const { return dot(c, ray(w)); }

  /// Coordinates of the form Tr(x^* x) (identity Hermitian matrix).
  RVec identity_form() const { return coordinates(identity_hermitian()); }

  // --- Hermitian model ------------------------------------------------------
  FMat identity_hermitian() const {
    FMat h(n_, std::vector<RElem>(n_, rzero()));
    for (int i = 0; i < n_; ++i) h[i][i] = relem(F_->one());
    return h;
  }

  /// Hermitian matrix with coordinates c.
  FMat hermitian(const RVec& c) const {
    FMat h(n_, std::vector<RElem>(n_, rzero()));
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      if (c[k] == 0) continue;
      const auto& e = elems_[k];
      RElem v = relem(e.value);
      for (auto& x : v) x *= c[k];
      h[e.i][e.j] = radd(h[e.i][e.j], v);
      if (e.i != e.j) h[e.j][e.i] = radd(h[e.j][e.i], rconj(v));
    }
    return h;
  }

  /// Coordinates of a Hermitian matrix; throws if h is not Hermitian.
  RVec coordinates(const FMat& h) const {
    RVec c(basis_.size(), Rat(0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (h[j][i] != rconj(h[i][j])) throw InvalidInput("matrix is not Hermitian");
    std::size_t k = 0;
    for (int i = 0; i < n_; ++i) {
      // Diagonal entry in the O^+ basis.
      RatMatrix a(d_, plus_.size());
      for (int r = 0; r < d_; ++r)
        for (std::size_t s = 0; s < plus_.size(); ++s) a(r, s) = plus_[s][r];
      auto sol = solve_unique(a, h[i][i]);
      if (!sol) throw InvalidInput("diagonal entry is not fixed by the involution");
      for (std::size_t s = 0; s < plus_.size(); ++s) c[k++] = (*sol)[s];
      for (int j = i + 1; j < n_; ++j)
        for (int l = 0; l < d_; ++l) c[k++] = h[i][j][l];
    }
    return c;
  }

  /// The point q(w) = w w^* as a Hermitian matrix.
  FMat q_matrix(const IVec& w) const {
    if (std::all_of(w.begin(), w.end(), [](const Int& x) { return x == 0; }))
      throw InvalidInput("q is undefined at the zero vector");
    FMat h(n_, std::vector<RElem>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) h[i][j] = rmul(relem(entry(w, i)), rconj(relem(entry(w, j))));
    return h;
  }

  /// g H g^*.
  FMat act(const OMat& g, const FMat& h) const {
    FMat gh(n_, std::vector<RElem>(n_, rzero()));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) gh[i][j] = radd(gh[i][j], rmul(relem(g[i][k]), h[k][j]));
    FMat out(n_, std::vector<RElem>(n_, rzero()));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) out[i][j] = radd(out[i][j], rmul(gh[i][k], rconj(relem(g[j][k]))));
    return out;
  }

  /// Per-place complex blocks of a Hermitian matrix.
  std::vector<std::vector<std::vector<std::complex<long double>>>> place_blocks(const FMat& h) const {
    std::vector<std::vector<std::vector<std::complex<long double>>>> out;
    for (int v = 0; v < F_->places(); ++v) {
      std::vector<std::vector<std::complex<long double>>> b(n_, std::vector<std::complex<long double>>(n_));
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          std::complex<long double> z = 0;
          for (int k = 0; k < d_; ++k) {
            Elem e = F_->basis_element(k);
            z += static_cast<long double>(h[i][j][k].get_d()) * F_->embed(e, v);
          }
          b[i][j] = z;
        }
      out.push_back(std::move(b));
    }
    return out;
  }

  // --- group elements -------------------------------------------------------
  /// Multiplication by the scalar a on O^n.
  IMat scalar(const Elem& a) const {
    IMat m(N_, N_, Int(0));
    IMat ma = F_->mult_matrix(a);
    for (int b = 0; b < n_; ++b)
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) m(b * d_ + i, b * d_ + j) = ma(i, j);
    return m;
  }

  /// Z-linear matrix of an O-matrix acting on column vectors.
  IMat from_o_matrix(const OMat& g) const {
    IMat m(N_, N_, Int(0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        IMat mg = F_->mult_matrix(g[i][j]);
        for (int a = 0; a < d_; ++a)
          for (int b = 0; b < d_; ++b) m(i * d_ + a, j * d_ + b) = mg(a, b);
      }
    return m;
  }

  /// Inverse of from_o_matrix for O-linear matrices.
  OMat to_o_matrix(const IMat& m) const {
    OMat g(n_, std::vector<Elem>(n_));
    const Elem one = F_->one();
    for (int j = 0; j < n_; ++j) {
      IVec e(N_, Int(0));
      for (int k = 0; k < d_; ++k) e[j * d_ + k] = one[k];
      IVec col = mat_vec(m, e);
      for (int i = 0; i < n_; ++i) g[i][j] = entry(col, i);
    }
    return g;
  }

  /// True when m commutes with multiplication by every basis element.
  bool is_o_linear(const IMat& m) const {
    for (int k = 0; k < d_; ++k) {
      IMat s = scalar(F_->basis_element(k));
      if (!(m * s == s * m)) return false;
    }
    return true;
  }

  // --- rays -----------------------------------------------------------------
  /// Canonical representative of {zeta w : zeta a root of unity}.
  IVec normalize(const IVec& w) const {
    IVec best = w;
    for (const auto& z : units_) {
      IVec c = mat_vec(z, w);
      if (c > best) best = std::move(c);
    }
    return best;
  }

  /// True when the entries of w generate the unit ideal.
  bool is_primitive(const IVec& w) const {
    std::vector<Elem> gens;
    for (int i = 0; i < n_; ++i) gens.push_back(entry(w, i));
    return algebra::OIdeal::from_generators(*F_, gens).is_unit_ideal();
  }

  /// Rank over F of the span of the given vectors.
  int f_rank(const std::vector<IVec>& ws) const {
    // The Z-span of {omega_k w} has rank deg F times the F-rank.
    RatMatrix m(ws.size() * d_, N_);
    std::size_t row = 0;
    for (const auto& w : ws)
      for (int k = 0; k < d_; ++k) {
        IVec x = mat_vec(scalar(F_->basis_element(k)), w);
        for (int c = 0; c < N_; ++c) m(row, c) = x[c];
        ++row;
      }
    return static_cast<int>(rank(std::move(m))) / d_;
  }

  /// True when the vectors span F^n, i.e. the cone they span meets the positive cone.
  bool spans(const std::vector<IVec>& ws) const { return f_rank(ws) == n_; }

 private:
  struct BasisElem {
    int i, j;
    Elem value;
  };

  Int quad(const IMat& g, const IVec& w) const {
    Int s = 0;
    for (int i = 0; i < N_; ++i) {
      if (w[i] == 0) continue;
      Int t = 0;
      for (int j = 0; j < N_; ++j)
        if (w[j] != 0 && g(i, j) != 0) t += g(i, j) * w[j];
      s += w[i] * t;
    }
    return s;
  }

  // Z-basis of O^+ = {a in O : c(a) = a}.
  void build_plus_basis() {
    IMat a(d_, d_, Int(0));
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) a(i, j) = conj_(i, j) - (i == j ? 1 : 0);
    plus_ = integer_kernel(a);
  }

  void build_basis() {
    auto add = [&](int i, int j, const Elem& beta) {
      IMat g(N_, N_, Int(0));
      for (int k = 0; k < d_; ++k)
        for (int l = 0; l < d_; ++l) {
          // Tr(c(omega_k) beta omega_l)
          Elem t = F_->mul(F_->mul(F_->conj(F_->basis_element(k)), beta), F_->basis_element(l));
          Int v = F_->trace(t);
          if (i == j) {
            g(i * d_ + k, i * d_ + l) = v;
          } else {
            g(i * d_ + k, j * d_ + l) = v;
            g(j * d_ + l, i * d_ + k) = v;
          }
        }
      basis_.push_back(std::move(g));
      elems_.push_back({i, j, beta});
    };
    for (int i = 0; i < n_; ++i) {
      for (const auto& b : plus_) add(i, i, b);
      for (int j = i + 1; j < n_; ++j)
        for (int l = 0; l < d_; ++l) add(i, j, F_->basis_element(l));
    }
  }

  std::shared_ptr<const NumberField> F_;
  int n_;
  int d_ = 1;
  int N_ = 1;
  std::vector<IMat> mult_;
  IMat conj_;
  std::vector<Elem> plus_;
  std::vector<IMat> basis_;
  std::vector<BasisElem> elems_;
  std::vector<IMat> units_;
};

}  // namespace vk::voronoi
