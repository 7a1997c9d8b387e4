#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vk/algebra/poly.hpp"
#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"

namespace vk::algebra {

using Rat = mpq_class;
/// Element of O in coordinates on the integral basis.
using Elem = std::vector<Int>;
/// Same, in machine integers (lattice enumeration and group elements).
using SElem = std::vector<std::int64_t>;
using Complex = std::complex<long double>;

/// Static description of a catalog field (the record in the catalog file).
struct FieldRecord {
  std::string label;
  std::vector<std::string> aliases;
  ZPoly poly;                       // monic, constant term first
  int r = 0;
  int s = 0;
  Int discriminant;
  std::vector<std::vector<Rat>> integral_basis;  // rows in power-basis coordinates
  std::vector<Elem> units;          // fundamental units, integral-basis coordinates
  unsigned torsion_order = 2;
  unsigned class_number = 1;
  std::string zeta_model;           // riemann | kronecker:<D> | cyclotomic:<q> | thetadiff:<A>:<a,b,c>:<a,b,c>
};

/// Complex roots of a monic integer polynomial, real roots first (ascending),
/// then one root per conjugate pair with positive imaginary part.
inline std::vector<Complex> polynomial_roots(const ZPoly& f) {
  const int d = degree(f);
  if (d < 1) return {};
  if (d == 1) return {Complex(-f[0].get_d(), 0)};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -f[i].get_d() / f[d].get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<Complex> raw;
  for (int i = 0; i < d; ++i) raw.emplace_back(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
  // Newton refinement in long double.
  auto eval = [&](Complex z) {
    Complex v = 0, dv = 0;
    for (int k = d; k >= 0; --k) {
      dv = dv * z + v;
      v = v * z + Complex(f[k].get_d(), 0);
    }
    return std::make_pair(v, dv);
  };
  for (auto& z : raw)
    for (int it = 0; it < 20; ++it) {
      auto [v, dv] = eval(z);
      if (std::abs(dv) == 0) break;
      z -= v / dv;
    }
  std::vector<Complex> real, cplx;
  for (auto z : raw) {
    if (std::abs(z.imag()) < 1e-9L * std::max<long double>(1, std::abs(z)))
      real.emplace_back(z.real(), 0);
    else if (z.imag() > 0)
      cplx.push_back(z);
  }
  std::sort(real.begin(), real.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  std::sort(cplx.begin(), cplx.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  real.insert(real.end(), cplx.begin(), cplx.end());
  return real;
}

/// Counts of real roots and conjugate pairs.
inline std::pair<int, int> polynomial_signature(const ZPoly& f) {
  auto roots = polynomial_roots(f);
  int r = 0;
  for (auto z : roots)
    if (z.imag() == 0) ++r;
  const int s = static_cast<int>(roots.size()) - r;
  if (r + 2 * s != degree(f)) throw InternalError("root finder lost roots");
  return {r, s};
}

/// Irreducibility over Q certified by incompatible factor-degree patterns
/// modulo small primes.
inline bool certify_irreducible(const ZPoly& f) {
  const int d = degree(f);
  if (d < 1) return false;
  if (d == 1) return true;
  // Discriminant-free approach: use primes where f stays squarefree mod p.
  std::set<int> possible;
  for (int k = 1; k < d; ++k) possible.insert(k);
  for (std::uint64_t p = 2; p < 400 && !possible.empty(); ++p) {
    bool prime = true;
    for (std::uint64_t q = 2; q * q <= p; ++q)
      if (p % q == 0) prime = false;
    if (!prime || mpz_divisible_ui_p(f.back().get_mpz_t(), p)) continue;
    auto fac = factor_mod_p(f, p);
    bool squarefree = true;
    std::vector<int> degs;
    for (const auto& x : fac) {
      if (x.exponent > 1) squarefree = false;
      degs.push_back(static_cast<int>(x.factor.size()) - 1);
    }
    if (!squarefree) continue;
    std::set<int> sums{0};
    for (int g : degs) {
      std::set<int> next = sums;
      for (int s : sums) next.insert(s + g);
      sums = std::move(next);
    }
    for (auto it = possible.begin(); it != possible.end();) it = sums.count(*it) ? std::next(it) : possible.erase(it);
  }
  return possible.empty();
}

class NumberField {
 public:
  explicit NumberField(FieldRecord rec) : rec_(std::move(rec)) { build(); }

  const FieldRecord& record() const { return rec_; }
  const std::string& label() const { return rec_.label; }
  const ZPoly& polynomial() const { return rec_.poly; }
  int degree() const { return d_; }
  int r() const { return rec_.r; }
  int s() const { return rec_.s; }
  const Int& discriminant() const { return rec_.discriminant; }
  unsigned torsion_order() const { return rec_.torsion_order; }
  unsigned class_number() const { return rec_.class_number; }
  const std::vector<Elem>& fundamental_units() const { return rec_.units; }
  int unit_rank() const { return rec_.r + rec_.s - 1; }
  bool is_rational() const { return d_ == 1; }
  /// True when the integral basis is the power basis of the defining root.
  bool monogenic_power_basis() const { return power_basis_; }

  Elem zero() const { return Elem(d_, Int(0)); }
  Elem one() const { return one_; }
  Elem basis_element(int i) const {
    Elem e = zero();
    e[i] = 1;
    return e;
  }
  Elem from_int(const Int& a) const {
    Elem e = one_;
    for (auto& x : e) x *= a;
    return e;
  }
  /// Coordinates of theta^k on the integral basis (theta the defining root).
  Elem theta_power(int k) const {
    Elem t = zero();
    if (k == 0) return one_;
    t = theta_;
    for (int i = 1; i < k; ++i) t = mul(t, theta_);
    return t;
  }

  Elem add(const Elem& a, const Elem& b) const {
    Elem c(d_);
    for (int i = 0; i < d_; ++i) c[i] = a[i] + b[i];
    return c;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem c(d_);
    for (int i = 0; i < d_; ++i) c[i] = a[i] - b[i];
    return c;
  }
  Elem neg(const Elem& a) const {
    Elem c(d_);
    for (int i = 0; i < d_; ++i) c[i] = -a[i];
    return c;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    Elem c = zero();
    for (int i = 0; i < d_; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < d_; ++j) {
        if (b[j] == 0) continue;
        const Int ab = a[i] * b[j];
        const auto& m = mult_[i][j];
        for (int k = 0; k < d_; ++k)
          if (m[k] != 0) c[k] += ab * m[k];
      }
    }
    return c;
  }
  SElem mul(const SElem& a, const SElem& b) const {
    SElem c(d_, 0);
    for (int i = 0; i < d_; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < d_; ++j) {
        if (b[j] == 0) continue;
        for (int k = 0; k < d_; ++k) c[k] += a[i] * b[j] * mult64_[i][j][k];
      }
    }
    return c;
  }
  Elem pow(Elem a, unsigned long e) const {
    Elem r = one_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// Integer matrix of multiplication by a: column j holds a * omega_j.
  Matrix<Int> mult_matrix(const Elem& a) const {
    Matrix<Int> m(d_, d_, Int(0));
    for (int j = 0; j < d_; ++j) {
      Elem c = mul(a, basis_element(j));
      for (int i = 0; i < d_; ++i) m(i, j) = c[i];
    }
    return m;
  }

  Int trace(const Elem& a) const {
    Int t = 0;
    for (int i = 0; i < d_; ++i) t += a[i] * traces_[i];
    return t;
  }
  const std::vector<Int>& basis_traces() const { return traces_; }

  Int norm(const Elem& a) const {
    Matrix<Int> m = mult_matrix(a);
    RatMatrix q(d_, d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) q(i, j) = m(i, j);
    Rat det = determinant(q);
    return det.get_num();
  }

  bool is_zero(const Elem& a) const {
    return std::all_of(a.begin(), a.end(), [](const Int& x) { return x == 0; });
  }

  /// The field involution used for hermitian forms: complex conjugation for
  /// CM fields, the identity for totally real fields, absent otherwise.
  bool has_involution() const { return conj_.has_value(); }
  Elem conj(const Elem& a) const {
    if (!conj_) throw ConfigError("field " + rec_.label + " has no canonical involution");
    Elem c = zero();
    for (int j = 0; j < d_; ++j)
      if (a[j] != 0)
        for (int i = 0; i < d_; ++i) c[i] += (*conj_)(i, j) * a[j];
    return c;
  }
  /// Conjugation matrix on the integral basis (column j = conj(omega_j)).
  const Matrix<Int>& conjugation_matrix() const {
    if (!conj_) throw ConfigError("field " + rec_.label + " has no canonical involution");
    return *conj_;
  }

  /// Archimedean embeddings: places 0..r-1 real, r..r+s-1 complex.
  int places() const { return rec_.r + rec_.s; }
  Complex embed(const Elem& a, int place) const {
    Complex z = 0;
    for (int i = 0; i < d_; ++i) z += static_cast<long double>(a[i].get_d()) * omega_embed_[place][i];
    return z;
  }
  Complex embed(const SElem& a, int place) const {
    Complex z = 0;
    for (int i = 0; i < d_; ++i) z += static_cast<long double>(a[i]) * omega_embed_[place][i];
    return z;
  }
  const std::vector<Complex>& roots() const { return roots_; }

  /// Roots of unity in O (torsion_order many), integral-basis coordinates.
  const std::vector<Elem>& roots_of_unity() const { return roots_of_unity_; }

  /// Trace-form discriminant det(Tr(omega_i omega_j)).
  Int basis_discriminant() const {
    RatMatrix q(d_, d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) q(i, j) = trace(mul(basis_element(i), basis_element(j)));
    return determinant(q).get_num();
  }

 private:
  // Power-basis product, reduced modulo the defining polynomial.
  std::vector<Rat> power_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) const {
    std::vector<Rat> c(2 * d_ - 1, Rat(0));
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) c[i + j] += a[i] * b[j];
    for (int k = 2 * d_ - 2; k >= d_; --k) {
      if (c[k] == 0) continue;
      Rat t = c[k];
      for (int j = 0; j < d_; ++j) c[k - d_ + j] -= t * Rat(rec_.poly[j]);
      c[k] = 0;
    }
    c.resize(d_);
    return c;
  }

  Elem to_integral(const std::vector<Rat>& power) const {
    // Solve x * B = power for x (B rows = basis).
    auto x = solve_unique(basis_t_, power);
    if (!x) throw ConfigError("integral basis of " + rec_.label + " is singular");
    Elem e(d_);
    for (int i = 0; i < d_; ++i) {
      if ((*x)[i].get_den() != 1) throw ConfigError("integral basis of " + rec_.label + " is not closed under products");
      e[i] = (*x)[i].get_num();
    }
    return e;
  }

  void build() {
    d_ = algebra::degree(rec_.poly);
    if (d_ < 1 || rec_.poly.back() != 1) throw InvalidInput("defining polynomial of " + rec_.label + " must be monic of degree >= 1");
    if (!certify_irreducible(rec_.poly)) throw InvalidInput("defining polynomial of " + rec_.label + " is reducible");
    auto [r, s] = polynomial_signature(rec_.poly);
    if (r != rec_.r || s != rec_.s)
      throw ConfigError("signature mismatch for " + rec_.label + ": catalog (" + std::to_string(rec_.r) + "," +
                        std::to_string(rec_.s) + "), polynomial (" + std::to_string(r) + "," + std::to_string(s) + ")");
    if (rec_.integral_basis.empty()) {
      for (int i = 0; i < d_; ++i) {
        std::vector<Rat> row(d_, Rat(0));
        row[i] = 1;
        rec_.integral_basis.push_back(row);
      }
    }
    if (static_cast<int>(rec_.integral_basis.size()) != d_) throw ConfigError("integral basis size mismatch for " + rec_.label);
    basis_t_ = RatMatrix(d_, d_);
    power_basis_ = true;
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        basis_t_(j, i) = rec_.integral_basis[i][j];
        if (rec_.integral_basis[i][j] != (i == j ? 1 : 0)) power_basis_ = false;
      }
    mult_.assign(d_, std::vector<Elem>(d_));
    mult64_.assign(d_, std::vector<SElem>(d_));
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        mult_[i][j] = to_integral(power_mul(rec_.integral_basis[i], rec_.integral_basis[j]));
        mult64_[i][j].resize(d_);
        for (int k = 0; k < d_; ++k) mult64_[i][j][k] = mult_[i][j][k].get_si();
      }
    std::vector<Rat> one_power(d_, Rat(0));
    one_power[0] = 1;
    one_ = to_integral(one_power);
    std::vector<Rat> theta_power(d_, Rat(0));
    if (d_ > 1)
      theta_power[1] = 1;
    else
      theta_power[0] = -Rat(rec_.poly[0]);
    theta_ = to_integral(theta_power);
    traces_.resize(d_);
    for (int i = 0; i < d_; ++i) {
      Int t = 0;
      for (int k = 0; k < d_; ++k) t += mult_[i][k][k];
      traces_[i] = t;
    }
    if (basis_discriminant() != rec_.discriminant)
      throw ConfigError("discriminant of the integral basis of " + rec_.label + " is " + basis_discriminant().get_str() +
                        ", catalog says " + rec_.discriminant.get_str());
    roots_ = polynomial_roots(rec_.poly);
    omega_embed_.assign(places(), std::vector<Complex>(d_));
    for (int v = 0; v < places(); ++v)
      for (int i = 0; i < d_; ++i) {
        Complex z = 0, pw = 1;
        for (int k = 0; k < d_; ++k) {
          z += static_cast<long double>(rec_.integral_basis[i][k].get_d()) * pw;
          pw *= roots_[v];
        }
        omega_embed_[v][i] = z;
      }
    if (static_cast<int>(rec_.units.size()) != unit_rank())
      throw ConfigError("field " + rec_.label + " needs " + std::to_string(unit_rank()) + " fundamental units");
    for (const auto& u : rec_.units) {
      if (static_cast<int>(u.size()) != d_) throw ConfigError("unit coordinate length mismatch for " + rec_.label);
      Int nu = norm(u);
      if (nu != 1 && nu != -1) throw ConfigError("catalog unit of " + rec_.label + " has norm " + nu.get_str());
    }
    build_involution();
    build_roots_of_unity();
  }

  Elem round_from_embedding(const std::vector<Complex>& images) const {
    // Real least squares on the stacked real/imaginary parts of all places.
    const int rows = rec_.r + 2 * rec_.s;
    Eigen::MatrixXd a(rows, d_);
    Eigen::VectorXd b(rows);
    int row = 0;
    for (int v = 0; v < places(); ++v) {
      for (int i = 0; i < d_; ++i) a(row, i) = static_cast<double>(omega_embed_[v][i].real());
      b(row++) = static_cast<double>(images[v].real());
      if (v >= rec_.r) {
        for (int i = 0; i < d_; ++i) a(row, i) = static_cast<double>(omega_embed_[v][i].imag());
        b(row++) = static_cast<double>(images[v].imag());
      }
    }
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    Elem e(d_);
    for (int i = 0; i < d_; ++i) e[i] = static_cast<long>(std::llround(x(i)));
    return e;
  }

  void build_involution() {
    if (rec_.s == 0) {
      conj_ = Matrix<Int>::identity(d_);
      return;
    }
    if (rec_.r > 0) return;  // mixed signature: no involution acting as conjugation at every place
    Matrix<Int> c(d_, d_, Int(0));
    for (int j = 0; j < d_; ++j) {
      std::vector<Complex> img(places());
      for (int v = 0; v < places(); ++v) img[v] = std::conj(omega_embed_[v][j]);
      Elem e = round_from_embedding(img);
      for (int i = 0; i < d_; ++i) c(i, j) = e[i];
    }
    conj_ = c;
    // Exact verification: ring automorphism of order 2 fixing 1, and consistent
    // with conjugation at every place.
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        if (conj(mul(basis_element(i), basis_element(j))) != mul(conj(basis_element(i)), conj(basis_element(j)))) {
          conj_.reset();
          return;
        }
    for (int j = 0; j < d_; ++j) {
      if (conj(conj(basis_element(j))) != basis_element(j)) {
        conj_.reset();
        return;
      }
      for (int v = 0; v < places(); ++v)
        if (std::abs(embed(conj(basis_element(j)), v) - std::conj(omega_embed_[v][j])) > 1e-8L) {
          conj_.reset();
          return;
        }
    }
  }

  void build_roots_of_unity() {
    // Enumerate elements of small height whose embeddings all have modulus 1
    // and which are roots of unity of order dividing the torsion order.
    const unsigned w = rec_.torsion_order;
    std::vector<Elem> found;
    const int bound = 2;
    Elem e = zero();
    std::vector<int> idx(d_, -bound);
    for (;;) {
      for (int i = 0; i < d_; ++i) e[i] = idx[i];
      if (!is_zero(e) && pow(e, w) == one_) found.push_back(e);
      int k = 0;
      while (k < d_ && idx[k] == bound) idx[k++] = -bound;
      if (k == d_) break;
      ++idx[k];
    }
    std::sort(found.begin(), found.end());
    // Keep only those whose order divides w: already guaranteed; check count.
    if (found.size() != w)
      throw ConfigError("field " + rec_.label + ": found " + std::to_string(found.size()) + " roots of unity, catalog says " +
                        std::to_string(w));
    // Order: 1 first, then by increasing multiplicative order, then coordinates.
    auto order_of = [&](const Elem& z) {
      Elem t = z;
      unsigned k = 1;
      while (t != one_) {
        t = mul(t, z);
        ++k;
      }
      return k;
    };
    std::stable_sort(found.begin(), found.end(), [&](const Elem& a, const Elem& b) { return order_of(a) < order_of(b); });
    roots_of_unity_ = std::move(found);
  }

  FieldRecord rec_;
  int d_ = 0;
  bool power_basis_ = true;
  RatMatrix basis_t_;
  std::vector<std::vector<Elem>> mult_;
  std::vector<std::vector<SElem>> mult64_;
  Elem one_;
  Elem theta_;
  std::vector<Int> traces_;
  std::vector<Complex> roots_;
  std::vector<std::vector<Complex>> omega_embed_;
  std::optional<Matrix<Int>> conj_;
  std::vector<Elem> roots_of_unity_;
};

/// Counts of real places and conjugate pairs of complex places.
inline std::pair<int, int> signature(const NumberField& f) { return {f.r(), f.s()}; }

}  // namespace vk::algebra
