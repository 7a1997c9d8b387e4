#pragma once

// Invariants of Gamma = GL_n(O) for a catalog field: symmetric space
// dimension, deficiency, torsion primes, and the Voronoi degrees matching
// the vcd and the top of the cuspidal range. Voronoi degree k corresponds
// to cohomological degree d - k.

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/core/error.hpp"

namespace vk::analytics {

using algebra::NumberField;

/// d = ((r + 2s) n^2 + r n - 2) / 2.
inline int symmetric_space_dim(int r, int s, int n) { return ((r + 2 * s) * n * n + r * n - 2) / 2; }
inline int symmetric_space_dim(const NumberField& F, int n) { return symmetric_space_dim(F.r(), F.s(), n); }

/// Absolute ranks at one archimedean place: the group, its maximal compact
/// subgroup, and the same for the center.
struct PlaceRanks {
  int group = 0;
  int compact = 0;
  int center = 0;
  int center_compact = 0;
};

inline PlaceRanks real_place_ranks(int n) { return {n, n / 2, 1, 0}; }      // GL_n(R), O(n)
inline PlaceRanks complex_place_ranks(int n) { return {2 * n, n, 2, 1}; }  // GL_n(C), U(n)

/// delta = rank G - rank K of the derived group, summed over places.
inline int deficiency(int r, int s, int n) {
  if (n < 1) throw InvalidInput("rank n must be positive");
  auto contrib = [](const PlaceRanks& p) { return (p.group - p.center) - (p.compact - p.center_compact); };
  return r * contrib(real_place_ranks(n)) + s * contrib(complex_place_ranks(n));
}
inline int deficiency(const NumberField& F, int n) { return deficiency(F.r(), F.s(), n); }

/// Degree of F(zeta_p) over F, from the subfield F cap Q(zeta_p). Decided
/// for fields whose only abelian subfields ramified at p are Q, F itself
/// when F is quadratic, or F = Q(zeta_p).
inline long cyclotomic_degree_over(const NumberField& F, long p) {
  const Int D = F.discriminant();
  if (p == 2 || F.degree() == 1 || D % p != 0) return p - 1;
  if (F.degree() == 2) {
    // The quadratic subfield of Q(zeta_p) has discriminant +-p, p = 1 mod 4 giving +p.
    const long pstar = p % 4 == 1 ? p : -p;
    return D == pstar ? (p - 1) / 2 : p - 1;
  }
  if (F.record().zeta_model == "cyclotomic:" + std::to_string(p)) return (p - 1) / F.degree();
  if (F.degree() == 3 && D < 0) return p - 1;  // non-Galois cubic: no nontrivial abelian subfield
  throw ConfigError("cannot decide [F(zeta_" + std::to_string(p) + "):F] for " + F.label());
}

/// Primes p with an element of order p in GL_n(O), i.e. [F(zeta_p):F] <= n.
inline std::vector<long> torsion_primes(const NumberField& F, int n) {
  std::vector<long> out;
  const long bound = static_cast<long>(n) * F.degree() + 1;  // [F(zeta_p):F] >= (p-1)/[F:Q]
  for (long p = 2; p <= bound; ++p) {
    bool prime = true;
    for (long q = 2; q * q <= p; ++q)
      if (p % q == 0) prime = false;
    if (prime && cyclotomic_degree_over(F, p) <= n) out.push_back(p);
  }
  return out;
}

struct GroupDescriptor {
  std::string field;
  int n = 0;
  int r = 0;
  int s = 0;
  int deficiency = 0;
  int sym_dim = 0;
  int flat_dim = 0;  // dimension of the flat factor from the units
  std::vector<long> torsion_primes;
  int vcd_voronoi_degree = 0;
  int cuspidal_top_voronoi_degree = 0;

  std::string name() const { return "GL" + std::to_string(n) + "/" + field; }
  int cohomological_degree(int voronoi_degree) const { return sym_dim - voronoi_degree; }
  bool is_torsion_prime(long p) const {
    for (auto q : torsion_primes)
      if (q == p) return true;
    return false;
  }
  friend bool operator==(const GroupDescriptor& a, const GroupDescriptor& b) {
    return a.field == b.field && a.n == b.n;
  }
};

inline GroupDescriptor describe_group(const NumberField& F, int n) {
  GroupDescriptor g;
  g.field = F.label();
  g.n = n;
  g.r = F.r();
  g.s = F.s();
  g.deficiency = deficiency(F, n);
  g.sym_dim = symmetric_space_dim(F, n);
  g.flat_dim = F.r() + F.s() - 1;
  g.torsion_primes = torsion_primes(F, n);
  // The vcd is d minus the Q-rank n - 1.
  g.vcd_voronoi_degree = n - 1;
  // The cuspidal range is centered in the non-flat part of dimension
  // d - flat and has length delta; its top maps to Voronoi degree
  // (d - flat - delta) / 2.
  g.cuspidal_top_voronoi_degree = (g.sym_dim - g.flat_dim - g.deficiency) / 2;
  return g;
}

}  // namespace vk::analytics
