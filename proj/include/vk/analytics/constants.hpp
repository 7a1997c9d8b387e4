#pragma once

// Closed forms for the conjectured limit c_{G,triv} mu(Gamma) of
// log |H_tors| / index, for the deficiency-one groups:
//   GL_2 over imaginary quadratic L   |D|^{3/2} zeta_L(2) / (48 pi^3)
//   GL_2 over a complex cubic F       |D|^{3/2} reg_F zeta_F(2) / (48 pi^5)
//   GL_n over Q, n = 3, 4             pi R_n prod_{k=2}^n (k-1)! zeta(k)
//                                     / (2^{(n^2-1)/2} pi^{(n^2+n-2)/2} sqrt(n))
// with R_3 = 1/2 and R_4 = 124/45. Volumes use the trace form on the Lie
// algebras.

#include <gmpxx.h>

#include <cmath>
#include <string>

#include "vk/algebra/field.hpp"
#include "vk/algebra/units.hpp"
#include "vk/algebra/zeta.hpp"
#include "vk/analytics/groups.hpp"
#include "vk/core/error.hpp"

namespace vk::analytics {

using algebra::Real;

struct Constant {
  Real value;
  double error_bound = 0;
};

namespace constants_detail {

inline Real pi() { return boost::math::constants::pi<Real>(); }

inline Real factorial(int k) {
  Real f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace constants_detail

/// vol(SU(n)) = sqrt(n) (2 pi)^{(n^2+n-2)/2} / (1! 2! ... (n-1)!).
inline Real vol_su(int n) {
  using namespace constants_detail;
  Real den = 1;
  for (int k = 1; k < n; ++k) den *= factorial(k);
  return sqrt(Real(n)) * pow(2 * pi(), (n * n + n - 2) / 2) / den;
}

/// vol(SO(3)) = 16 sqrt(2) pi^2: the rotation subgroups have length 2 pi sqrt(2)
/// and SO(3) is a 3-sphere of radius 2 sqrt(2) modulo +-1.
inline Real vol_so3() { return 16 * sqrt(Real(2)) * constants_detail::pi() * constants_detail::pi(); }

/// L2-torsion R_n factor of SL_n(R) for the trivial representation.
inline Real l2_torsion_factor(int n) {
  if (n == 3) return Real(1) / 2;
  if (n == 4) return Real(124) / 45;
  return 0;
}

/// Highest-weight data p eps_1 + q eps_2 + r eps_3 of an SL_3(R) representation.
struct Sl3Weight {
  Real a1, a2, a3, c1, c2, c3;

  Sl3Weight(long p, long q, long r) {
    if (p < q || q < r) throw InvalidInput("weight (" + std::to_string(p) + "," + std::to_string(q) + "," +
                                           std::to_string(r) + ") is not dominant");
    a1 = Real(p + 1 - q) / 2;
    a2 = Real(p - r + 2) / 2;
    a3 = Real(q - r + 1) / 2;
    c1 = Real(p + q - 2 * r + 3) / 3;
    c2 = Real(p + r - 2 * q) / 3;
    c3 = Real(2 * p - q - r + 3) / 3;
  }

  /// 2 A1 A3 C1 C3 + 2 A2 |C2| X, with X = A3 C3 on the branch C2 >= 0 and
  /// X = A1 C1 on the branch C2 <= 0.
  Real bracket_branch(bool nonnegative) const {
    return 2 * a1 * a3 * c1 * c3 + 2 * a2 * abs(c2) * (nonnegative ? a3 * c3 : a1 * c1);
  }
  Real bracket() const { return bracket_branch(c2 >= 0); }
};

/// pi vol(SO(3)) / vol(SU(3)).
inline Real sl3_prefactor() { return constants_detail::pi() * vol_so3() / vol_su(3); }

/// L2-analytic torsion of SL_3(R) for the representation of highest weight (p, q, r).
inline Real sl3_l2torsion(long p, long q, long r) { return sl3_prefactor() * Sl3Weight(p, q, r).bracket(); }

/// c_{G,triv} mu(GL_n(O)); throws InvalidInput when delta != 1 or no closed form is known.
inline Constant bv_limit(const NumberField& F, int n, int digits = 20) {
  using namespace constants_detail;
  const int delta = deficiency(F, n);
  if (delta != 1)
    throw InvalidInput("GL" + std::to_string(n) + "/" + F.label() + " has deficiency " + std::to_string(delta) +
                       "; the limit is conjecturally zero");
  const Real absD = abs(Real(F.discriminant().get_str()));
  if (n == 2 && F.degree() == 2 && F.s() == 1) {
    auto z = algebra::dedekind_zeta(F, 2, digits);
    const Real c = pow(absD, Real(3) / 2) / (48 * pow(pi(), 3));
    return {c * z.value, static_cast<double>(c) * z.error_bound};
  }
  if (n == 2 && F.degree() == 3 && F.r() == 1 && F.s() == 1) {
    auto z = algebra::dedekind_zeta(F, 2, digits);
    const Real reg = algebra::regulator(F);
    const Real c = pow(absD, Real(3) / 2) / (48 * pow(pi(), 5));
    // The regulator is computed in long double, good to about 1e-17 relative.
    const double reg_err = static_cast<double>(reg) * 1e-17;
    return {c * reg * z.value,
            static_cast<double>(c) * (static_cast<double>(reg) * z.error_bound + static_cast<double>(z.value) * reg_err)};
  }
  if (F.degree() == 1 && (n == 3 || n == 4)) {
    Real num = pi() * l2_torsion_factor(n);
    double rel = 0;
    for (int k = 2; k <= n; ++k) {
      auto z = algebra::riemann_zeta(k, digits);
      num *= factorial(k - 1) * z.value;
      rel += z.error_bound / static_cast<double>(z.value);
    }
    const Real den = pow(Real(2), Real(n * n - 1) / 2) * pow(pi(), Real(n * n + n - 2) / 2) * sqrt(Real(n));
    const Real v = num / den;
    return {v, static_cast<double>(v) * rel * 1.01};
  }
  throw InvalidInput("no closed form for GL" + std::to_string(n) + "/" + F.label());
}

}  // namespace vk::analytics
