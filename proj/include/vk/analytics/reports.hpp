#pragma once

// Torsion reports and the data series built from them. Each prime dividing
// a torsion order is tagged torsion (a torsion prime of Gamma), congruence
// (divides Norm(p) - 1 for a prime p of the level) or exotic; composite
// residuals left by the factorizer are kept apart as unclassified.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vk/algebra/ideal.hpp"
#include "vk/analytics/groups.hpp"
#include "vk/core/error.hpp"
#include "vk/exactla/factor.hpp"

namespace vk::analytics {

using algebra::OIdeal;
using exactla::Factorization;

enum class PrimeTag { torsion, congruence, exotic };

inline std::string to_string(PrimeTag t) {
  switch (t) {
    case PrimeTag::torsion:
      return "torsion";
    case PrimeTag::congruence:
      return "congruence";
    case PrimeTag::exotic:
      return "exotic";
  }
  return "?";
}

inline PrimeTag parse_prime_tag(const std::string& s) {
  if (s == "torsion") return PrimeTag::torsion;
  if (s == "congruence") return PrimeTag::congruence;
  if (s == "exotic") return PrimeTag::exotic;
  throw InvalidInput("unknown prime tag '" + s + "'");
}

inline const char* kResidualTag = "unclassified-residual";

struct TaggedPrime {
  Int prime;
  unsigned exponent = 0;
  PrimeTag tag = PrimeTag::exotic;
};

struct TorsionReport {
  GroupDescriptor group;
  OIdeal level;
  Int level_norm;
  std::string level_hnf;
  bool is_prime_level = false;
  Int index;
  int degree = 0;  // Voronoi degree
  std::size_t betti = 0;
  Factorization torsion;
  std::vector<TaggedPrime> tags;  // one per prime divisor, increasing
  double log_ratio = 0;

  int cohomological_degree() const { return group.cohomological_degree(degree); }
  Int torsion_order() const { return torsion.value(); }
  std::map<Int, unsigned> exponents_with(PrimeTag t) const {
    std::map<Int, unsigned> out;
    for (const auto& tp : tags)
      if (tp.tag == t) out[tp.prime] = tp.exponent;
    return out;
  }
};

/// Natural logarithm of a positive integer.
inline double log_int(const Int& x) {
  if (x <= 0) throw InvalidInput("log of a non-positive integer");
  long e = 0;
  const double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

inline PrimeTag tag_prime(const GroupDescriptor& g, const std::vector<Int>& level_prime_norms, const Int& p) {
  if (p.fits_slong_p() && g.is_torsion_prime(p.get_si())) return PrimeTag::torsion;
  for (const auto& N : level_prime_norms)
    if ((N - 1) % p == 0) return PrimeTag::congruence;
  return PrimeTag::exotic;
}

inline std::vector<Int> level_prime_norms(const OIdeal& level) {
  std::vector<Int> out;
  if (level.is_unit_ideal()) return out;
  for (const auto& f : algebra::ideal_factor(level)) out.push_back(f.prime.norm());
  return out;
}

inline TorsionReport classify_primes(const GroupDescriptor& g, const OIdeal& level, const Factorization& torsion,
                                     const Int& index, int degree, std::size_t betti) {
  if (degree < 0 || degree > g.sym_dim)
    throw InvalidInput("Voronoi degree " + std::to_string(degree) + " outside [0, " + std::to_string(g.sym_dim) + "]");
  if (index <= 0) throw InvalidInput("index must be positive");
  TorsionReport r;
  r.group = g;
  r.level = level;
  r.level_norm = level.norm();
  r.level_hnf = level.hnf_string();
  r.is_prime_level = algebra::is_prime_ideal(level);
  r.index = index;
  r.degree = degree;
  r.betti = betti;
  r.torsion = torsion;
  const auto norms = level_prime_norms(level);
  for (const auto& [p, e] : torsion.primes) r.tags.push_back({p, e, tag_prime(g, norms, p)});
  r.log_ratio = log_int(torsion.value()) / index.get_d();
  return r;
}

enum class Ordering { by_index, by_level_norm };

struct SeriesPoint {
  double x = 0;
  double y = 0;
  bool is_prime = false;
  std::string level_hnf;
  int tower = -1;  // tower id, -1 when not on a tower
};

struct Series {
  std::string mode = "ratio";  // ratio or euler
  std::string group;
  int degree = 0;  // ratio: the degree; euler: the sign origin
  Ordering ordering = Ordering::by_index;
  std::optional<double> reference;
  bool conjecturally_zero = false;
  std::vector<SeriesPoint> points;
  std::vector<std::string> flags;
};

namespace reports_detail {

inline void require_one_group(const std::vector<TorsionReport>& reports) {
  for (const auto& r : reports)
    if (!(r.group == reports.front().group))
      throw InvalidInput("reports mix groups " + reports.front().group.name() + " and " + r.group.name());
}

inline double x_of(const TorsionReport& r, Ordering o) {
  return o == Ordering::by_index ? r.index.get_d() : r.level_norm.get_d();
}

inline void sort_points(std::vector<SeriesPoint>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const SeriesPoint& a, const SeriesPoint& b) { return a.x < b.x; });
}

inline void set_reference(Series& s, const GroupDescriptor& g, std::optional<double> bv) {
  if (g.deficiency == 1) {
    s.reference = bv;
  } else {
    s.reference = 0.0;
    s.conjecturally_zero = true;
  }
}

}  // namespace reports_detail

/// (x, log|H_tors| / index) for the reports in `degree`, sorted by x. The
/// reference is bv (when delta = 1) or a zero line flagged conjecturally zero.
inline Series ratio_series(const std::vector<TorsionReport>& reports, int degree, Ordering ordering,
                           std::optional<double> bv = std::nullopt) {
  using namespace reports_detail;
  Series s;
  s.degree = degree;
  s.ordering = ordering;
  if (reports.empty()) return s;
  require_one_group(reports);
  const auto& g = reports.front().group;
  s.group = g.name();
  set_reference(s, g, bv);
  for (const auto& r : reports)
    if (r.degree == degree) s.points.push_back({x_of(r, ordering), r.log_ratio, r.is_prime_level, r.level_hnf, -1});
  sort_points(s.points);
  return s;
}

/// Voronoi degree carrying the + sign in the alternating sum: the degree
/// whose group homology counterpart is H_{(d-1)/2}, i.e. the top of the
/// cuspidal range.
inline int euler_sign_origin(const GroupDescriptor& g) { return g.cuspidal_top_voronoi_degree; }

/// Per level, sum over k of (-1)^(k - origin) log|H_k,tors| / index over the
/// contiguous window of degrees reported for that level. Gaps in the window
/// contribute 0 and are flagged.
inline Series euler_characteristic_series(const std::vector<TorsionReport>& reports, int sign_origin_degree,
                                          Ordering ordering, std::optional<double> bv = std::nullopt) {
  using namespace reports_detail;
  Series s;
  s.mode = "euler";
  s.degree = sign_origin_degree;
  s.ordering = ordering;
  if (reports.empty()) return s;
  require_one_group(reports);
  const auto& g = reports.front().group;
  s.group = g.name();
  set_reference(s, g, bv);
  std::map<std::string, std::vector<const TorsionReport*>> by_level;
  std::vector<std::string> order;
  for (const auto& r : reports) {
    auto& v = by_level[r.level_hnf];
    if (v.empty()) order.push_back(r.level_hnf);
    v.push_back(&r);
  }
  for (const auto& hnf : order) {
    const auto& v = by_level[hnf];
    std::map<int, double> ratio;
    for (auto* r : v) {
      if (ratio.count(r->degree)) throw InvalidInput("level " + hnf + " has two reports in degree " + std::to_string(r->degree));
      ratio[r->degree] = r->log_ratio;
    }
    double y = 0;
    for (int k = ratio.begin()->first; k <= ratio.rbegin()->first; ++k) {
      auto it = ratio.find(k);
      if (it == ratio.end()) {
        s.flags.push_back("level " + hnf + ": degree " + std::to_string(k) + " missing, counted as 0");
        continue;
      }
      y += ((k - sign_origin_degree) % 2 == 0 ? 1.0 : -1.0) * it->second;
    }
    s.points.push_back({x_of(*v.front(), ordering), y, v.front()->is_prime_level, hnf, -1});
  }
  sort_points(s.points);
  return s;
}

struct SeriesFilter {
  enum class Kind { all, prime, tower } kind = Kind::all;
  std::optional<OIdeal> seed;  // tower only
};

/// all: identity; prime: prime levels; tower: the divisibility chain
/// n_1 | n_2 | ... grown greedily in norm order from the seed.
inline std::vector<TorsionReport> filter_series(const std::vector<TorsionReport>& reports, const SeriesFilter& f) {
  using Kind = SeriesFilter::Kind;
  std::vector<TorsionReport> out;
  if (f.kind == Kind::all) return reports;
  if (f.kind == Kind::prime) {
    for (const auto& r : reports)
      if (r.is_prime_level) out.push_back(r);
    return out;
  }
  if (!f.seed) throw InvalidInput("tower filter needs a seed level");
  std::vector<const TorsionReport*> sorted;
  for (const auto& r : reports) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TorsionReport* a, const TorsionReport* b) { return a->level_norm < b->level_norm; });
  std::optional<OIdeal> last;
  for (auto* r : sorted) {
    const OIdeal& L = r->level;
    if (!f.seed->contains(L)) continue;
    if (last && !last->contains(L)) continue;
    last = L;
    out.push_back(*r);
  }
  return out;
}

struct SharedExotic {
  Int level_norm;
  std::map<Int, std::pair<unsigned, unsigned>> primes;  // prime -> (exponent in a, exponent in b)
};

/// Primes exotic in both reports, which must share a rational level.
inline SharedExotic shared_exotic_report(const TorsionReport& a, const TorsionReport& b) {
  if (a.level_norm != b.level_norm || a.group.field != b.group.field)
    throw InvalidInput("reports are for different levels: " + a.level_hnf + " and " + b.level_hnf);
  SharedExotic s;
  s.level_norm = a.level_norm;
  auto ea = a.exponents_with(PrimeTag::exotic), eb = b.exponents_with(PrimeTag::exotic);
  for (const auto& [p, e] : ea) {
    auto it = eb.find(p);
    if (it != eb.end()) s.primes[p] = {e, it->second};
  }
  return s;
}

}  // namespace vk::analytics
