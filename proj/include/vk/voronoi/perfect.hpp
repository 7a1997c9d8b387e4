#pragma once

// Perfect forms over O^n: minimal vectors, perfection, the Voronoi neighbor
// step across a facet of a perfect pyramid, and the neighbor walk.

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"
#include "vk/voronoi/cell.hpp"
#include "vk/voronoi/cone.hpp"
#include "vk/voronoi/form_space.hpp"
#include "vk/voronoi/shortvec.hpp"

namespace vk::voronoi {

/// Exact positive semidefiniteness by symmetric elimination with diagonal pivots.
inline bool is_positive_semidefinite(RatMatrix a) {
  const std::size_t n = a.rows();
  std::vector<char> alive(n, 1);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t k = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      if (a(i, i) < 0) return false;
      if (a(i, i) > 0 && k == n) k = i;
    }
    if (k == n) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (alive[i] && alive[j] && a(i, j) != 0) return false;
      return true;
    }
    alive[k] = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!alive[r] || a(r, k) == 0) continue;
      Rat f = a(r, k) / a(k, k);
      for (std::size_t c = 0; c < n; ++c)
        if (alive[c]) a(r, c) -= f * a(k, c);
    }
  }
  return true;
}

inline bool is_positive_definite(const RatMatrix& g) { return first_nonpositive_minor(g) == 0; }

/// Minimum and minimal vectors of the form with coordinates c.
inline MinimalVectors minimal_vectors(const FormSpace& V, const RVec& c) {
  RatMatrix g = V.gram(c);
  require_positive_definite(g);
  return minimal_vectors_of_gram(g);
}

inline std::vector<IVec> rays_of(const FormSpace& V, const std::vector<IVec>& ws) {
  std::vector<IVec> r;
  for (const auto& w : ws) r.push_back(V.ray(w));
  return r;
}

/// True when the minimal vectors determine the form up to scale.
inline bool is_perfect(const FormSpace& V, const RVec& c) {
  auto mv = minimal_vectors(V, c);
  return static_cast<int>(ray_rank(rays_of(V, mv.vectors))) == V.D();
}

/// Scales a nonzero rational vector to a primitive integral one.
inline RVec primitive_coords(const RVec& c) {
  Int l = 1;
  for (const auto& x : c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  IVec v;
  for (const auto& x : c) v.push_back(Int(x * l));
  return to_rvec(primitive_part(v));
}

inline RVec axpy(const RVec& p, const Rat& t, const RVec& f) {
  RVec out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + t * f[i];
  return out;
}

/// Moves from P along f (f >= 0 on Min(P)) to the first form P + rho f whose
/// minimum is still m and which gains new minimal vectors.
inline RVec voronoi_step(const FormSpace& V, const RVec& p, const Rat& m, const RVec& f) {
  Rat lo = 0, hi = 1;
  MinimalVectors mv;
  for (int guard = 0;; ++guard) {
    if (guard > 400) throw InternalError("neighbor search did not bracket the contiguous form");
    RatMatrix g = V.gram(axpy(p, hi, f));
    if (!is_positive_definite(g)) {
      hi = (lo + hi) / 2;
      continue;
    }
    mv = minimal_vectors_of_gram(g);
    if (mv.minimum < m) break;
    lo = hi;
    hi *= 2;
  }
  for (int guard = 0;; ++guard) {
    if (guard > 400) throw InternalError("neighbor search did not converge");
    std::optional<Rat> rho;
    for (const auto& v : mv.vectors) {
      Rat fv = V.value(f, v);
      if (fv >= 0) continue;
      Rat t = (V.value(p, v) - m) / (-fv);
      if (!rho || t < *rho) rho = t;
    }
    if (!rho) throw InternalError("neighbor search lost its descent direction");
    RVec q = axpy(p, *rho, f);
    mv = minimal_vectors_of_gram(V.gram(q));
    if (mv.minimum == m) return q;
  }
}

/// A perfect form with the same minimum reached from c by repeated steps
/// along directions in the annihilator of the current minimal rays.
inline RVec perfection(const FormSpace& V, RVec c) {
  for (int guard = 0; guard <= V.D(); ++guard) {
    auto mv = minimal_vectors(V, c);
    auto rays = rays_of(V, mv.vectors);
    RatMatrix a(rays.size(), V.D());
    for (std::size_t i = 0; i < rays.size(); ++i)
      for (int j = 0; j < V.D(); ++j) a(i, j) = rays[i][j];
    auto ns = nullspace(a);
    if (ns.empty()) return c;
    RVec f = ns.front();
    if (is_positive_semidefinite(V.gram(f)))
      for (auto& x : f) x = -x;
    c = voronoi_step(V, c, mv.minimum, f);
  }
  throw InternalError("perfection did not terminate");
}

struct PerfectForm {
  RVec coords;                        // primitive integral coordinates
  Rat minimum;
  std::vector<IVec> minimal_vectors;  // closed under negation and roots of unity
  KoecherCell pyramid;
  std::vector<std::size_t> neighbors;  // class of the neighbor across each pyramid facet
};

inline PerfectForm make_perfect_form(const FormSpace& V, const RVec& c) {
  PerfectForm pf;
  pf.coords = primitive_coords(c);
  auto mv = minimal_vectors(V, pf.coords);
  pf.minimum = mv.minimum;
  pf.minimal_vectors = mv.vectors;
  pf.pyramid = make_cell(V, mv.vectors);
  if (pf.pyramid.dim + 1 != V.D()) throw InvalidInput("form is not perfect");
  return pf;
}

struct WalkOptions {
  std::size_t max_forms = 1000;
};

/// One representative per GL_n(O)-class of perfect forms, by neighbor walking.
inline std::vector<PerfectForm> enumerate_perfect_forms(const FormSpace& V, const WalkOptions& opt = {}) {
  std::vector<PerfectForm> forms;
  std::vector<CellShape> shapes;
  std::map<Fingerprint, std::vector<std::size_t>> buckets;
  auto classify = [&](PerfectForm pf) -> std::size_t {
    CellShape sh(V, pf.pyramid);
    auto& bucket = buckets[sh.fingerprint()];
    for (auto i : bucket)
      if (!sh.maps_to(shapes[i], true).empty()) return i;
    if (forms.size() >= opt.max_forms) {
      std::string frontier;
      for (std::size_t i = 0; i < forms.size(); ++i)
        if (forms[i].neighbors.empty())
          frontier += " #" + std::to_string(i) + "(" + std::to_string(forms[i].pyramid.size()) + " rays)";
      throw BudgetExceeded("perfect form walk for " + V.field().label() + ", n=" + std::to_string(V.n()) +
                           " exceeded " + std::to_string(opt.max_forms) + " classes; open frontier:" + frontier);
    }
    bucket.push_back(forms.size());
    forms.push_back(std::move(pf));
    shapes.push_back(std::move(sh));
    return forms.size() - 1;
  };
  classify(make_perfect_form(V, perfection(V, V.identity_form())));
  const RVec positive = V.identity_form();
  for (std::size_t i = 0; i < forms.size(); ++i) {
    ConeFaces cone(forms[i].pyramid.rays, positive);
    std::vector<std::size_t> nb;
    for (const auto& [bits, normal] : cone.ambient_facets()) {
      RVec q = voronoi_step(V, forms[i].coords, forms[i].minimum, normal);
      nb.push_back(classify(make_perfect_form(V, q)));
    }
    forms[i].neighbors = std::move(nb);
  }
  return forms;
}

}  // namespace vk::voronoi
