#pragma once

// Koecher cells as sets of rank-one rays q(w), with GL_n(O)-equivalence and
// stabilizers found by backtracking. The matching invariant is the Hermitian
// form B(x, y) = Tr(x^* S^{-1} y), S = sum_i q(w_i), which transforms
// covariantly under any gamma mapping one ray set onto another.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"
#include "vk/voronoi/cone.hpp"
#include "vk/voronoi/form_space.hpp"

namespace vk::voronoi {

struct KoecherCell {
  std::vector<IVec> reps;  // normalized primitive vectors w, ordered by their rays
  std::vector<IVec> rays;  // ray coordinates r(w) in Z^D, sorted
  int dim = -1;            // dimension of the spanned cone minus one

  std::size_t size() const { return rays.size(); }
  std::string describe() const {
    std::string s = "cell(dim " + std::to_string(dim) + ", rays";
    for (const auto& r : rays) {
      s += " [";
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i].get_str();
      s += "]";
    }
    return s + ")";
  }
};

inline std::size_t ray_rank(const std::vector<IVec>& rays) {
  if (rays.empty()) return 0;
  RatMatrix m(rays.size(), rays.front().size());
  for (std::size_t i = 0; i < rays.size(); ++i)
    for (std::size_t j = 0; j < rays[i].size(); ++j) m(i, j) = rays[i][j];
  return rank(std::move(m));
}

/// Builds a cell from vectors of O^n; vectors are normalized and deduplicated.
inline KoecherCell make_cell(const FormSpace& V, const std::vector<IVec>& ws) {
  std::map<IVec, IVec> by_ray;
  for (const auto& w : ws) {
    IVec n = V.normalize(w);
    by_ray.emplace(V.ray(n), std::move(n));
  }
  KoecherCell c;
  for (auto& [r, w] : by_ray) {
    c.rays.push_back(r);
    c.reps.push_back(w);
  }
  c.dim = static_cast<int>(ray_rank(c.rays)) - 1;
  return c;
}

/// Sub-cell on a subset of the rays of a cell.
inline KoecherCell sub_cell(const FormSpace& V, const KoecherCell& c, const Bits& subset) {
  std::vector<IVec> ws;
  for (auto i = subset.find_first(); i != Bits::npos; i = subset.find_next(i)) ws.push_back(c.reps[i]);
  return make_cell(V, ws);
}

/// Image gamma . cell.
inline KoecherCell transform_cell(const FormSpace& V, const IMat& g, const KoecherCell& c) {
  std::vector<IVec> ws;
  for (const auto& w : c.reps) ws.push_back(mat_vec(g, w));
  return make_cell(V, ws);
}

struct Fingerprint {
  std::size_t rays = 0;
  int dim = -1;
  std::vector<Rat> diagonal;
  std::vector<std::vector<Rat>> pairs;

  auto key() const { return std::tie(rays, dim, diagonal, pairs); }
  friend bool operator==(const Fingerprint& a, const Fingerprint& b) { return a.key() == b.key(); }
  friend bool operator<(const Fingerprint& a, const Fingerprint& b) { return a.key() < b.key(); }
};

struct MatchOptions {
  std::size_t max_nodes = 20000000;
};

/// Matching data for one spanning cell.
class CellShape {
 public:
  CellShape(const FormSpace& V, KoecherCell cell) : V_(&V), cell_(std::move(cell)) {
    if (!V.spans(cell_.reps)) throw InvalidInput("cell does not meet the positive cone: " + cell_.describe());
    const int N = V.N();
    for (const auto& w : cell_.reps)
      if (!V.is_primitive(w)) throw InternalError("non-primitive ray representative in " + cell_.describe());
    // Gram of S^{-1} as a trace form.
    FMat s = V.q_matrix(cell_.reps.front());
    for (std::size_t i = 1; i < cell_.reps.size(); ++i) {
      FMat t = V.q_matrix(cell_.reps[i]);
      for (int a = 0; a < V.n(); ++a)
        for (int b = 0; b < V.n(); ++b) s[a][b] = V.radd(s[a][b], t[a][b]);
    }
    RatMatrix gs = V.gram(V.coordinates(s));
    RatMatrix g1 = V.gram(V.identity_form());
    inner_ = g1 * SpanFrame::inverse(gs) * g1;
    // Vectors zeta w for every rep and root of unity.
    const auto& mu = V.roots_of_unity();
    for (std::size_t z = 0; z < mu.size(); ++z)
      if (mu[z] == IMat::identity(N)) one_ = z;
    zw_.assign(cell_.size(), {});
    gzw_.assign(cell_.size(), {});
    for (std::size_t k = 0; k < cell_.size(); ++k)
      for (const auto& m : mu) {
        IVec v = mat_vec(m, cell_.reps[k]);
        RVec gv(N, Rat(0));
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            if (v[j] != 0) gv[i] += inner_(i, j) * v[j];
        zw_[k].push_back(std::move(v));
        gzw_[k].push_back(std::move(gv));
      }
    // F-independent reference vectors.
    std::vector<IVec> acc;
    for (std::size_t k = 0; k < cell_.size() && static_cast<int>(basis_.size()) < V.n(); ++k) {
      acc.push_back(cell_.reps[k]);
      if (V.f_rank(acc) == static_cast<int>(acc.size()))
        basis_.push_back(k);
      else
        acc.pop_back();
    }
    RatMatrix w(N, N);
    for (std::size_t s2 = 0; s2 < basis_.size(); ++s2)
      for (int l = 0; l < V.degree(); ++l) {
        IVec col = mat_vec(V.scalar(V.field().basis_element(l)), cell_.reps[basis_[s2]]);
        for (int r = 0; r < N; ++r) w(r, s2 * V.degree() + l) = col[r];
      }
    basis_inv_ = SpanFrame::inverse(w);
    for (std::size_t k = 0; k < cell_.size(); ++k) index_.emplace(cell_.reps[k], k);
    // Fingerprint.
    fp_.rays = cell_.size();
    fp_.dim = cell_.dim;
    for (std::size_t i = 0; i < cell_.size(); ++i) {
      fp_.diagonal.push_back(b(i, one_, i, one_));
      for (std::size_t j = i + 1; j < cell_.size(); ++j) {
        std::vector<Rat> vals;
        for (std::size_t z = 0; z < mu.size(); ++z) vals.push_back(b(i, one_, j, z));
        std::sort(vals.begin(), vals.end());
        fp_.pairs.push_back(std::move(vals));
      }
    }
    std::sort(fp_.diagonal.begin(), fp_.diagonal.end());
    std::sort(fp_.pairs.begin(), fp_.pairs.end());
  }

  const KoecherCell& cell() const { return cell_; }
  const Fingerprint& fingerprint() const { return fp_; }

  /// B(zeta_z1 w_k1, zeta_z2 w_k2).
  Rat b(std::size_t k1, std::size_t z1, std::size_t k2, std::size_t z2) const {
    Rat s = 0;
    const auto& x = zw_[k1][z1];
    const auto& gy = gzw_[k2][z2];
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] != 0) s += x[i] * gy[i];
    return s;
  }

  /// Elements gamma with gamma . this = other. With first_only, stops at one;
  /// otherwise returns all of them up to multiplication by roots of unity.
  std::vector<IMat> maps_to(const CellShape& other, bool first_only, const MatchOptions& opt = {}) const {
    std::vector<IMat> found;
    if (!(fp_ == other.fp_)) return found;
    const FormSpace& V = *V_;
    const std::size_t n = basis_.size();
    const std::size_t nz = V.roots_of_unity().size();
    const int N = V.N();
    const int d = V.degree();
    std::vector<std::size_t> pi(n), lam(n);
    std::vector<char> used(other.cell_.size(), 0);
    std::vector<Rat> diag(n);
    for (std::size_t s = 0; s < n; ++s) diag[s] = b(basis_[s], one_, basis_[s], one_);
    std::size_t nodes = 0;
    std::vector<IMat> scal;
    for (int l = 0; l < d; ++l) scal.push_back(V.scalar(V.field().basis_element(l)));

    auto complete = [&]() {
      RatMatrix wp(N, N);
      for (std::size_t s = 0; s < n; ++s)
        for (int l = 0; l < d; ++l) {
          IVec col = mat_vec(scal[l], other.zw_[pi[s]][lam[s]]);
          for (int r = 0; r < N; ++r) wp(r, s * d + l) = col[r];
        }
      RatMatrix g = wp * basis_inv_;
      IMat gi(N, N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          if (g(i, j).get_den() != 1) return;
          gi(i, j) = g(i, j).get_num();
        }
      Int det = determinant(gi);
      if (det != 1 && det != -1) return;
      for (const auto& w : cell_.reps)
        if (!other.index_.count(V.normalize(mat_vec(gi, w)))) return;
      found.push_back(std::move(gi));
    };

    auto rec = [&](auto&& self, std::size_t s) -> bool {
      if (++nodes > opt.max_nodes) throw BudgetExceeded("isometry search exceeded its budget on " + cell_.describe());
      if (s == n) {
        complete();
        return first_only && !found.empty();
      }
      for (std::size_t k = 0; k < other.cell_.size(); ++k) {
        if (used[k]) continue;
        if (other.b(k, other.one_, k, other.one_) != diag[s]) continue;
        for (std::size_t z = 0; z < nz; ++z) {
          if (s == 0 && z != other.one_) continue;
          bool ok = true;
          for (std::size_t t = 0; t < s && ok; ++t)
            ok = other.b(pi[t], lam[t], k, z) == b(basis_[t], one_, basis_[s], one_);
          if (!ok) continue;
          pi[s] = k;
          lam[s] = z;
          used[k] = 1;
          bool stop = self(self, s + 1);
          used[k] = 0;
          if (stop) return true;
        }
      }
      return false;
    };
    rec(rec, 0);
    return found;
  }

 private:
  const FormSpace* V_;
  KoecherCell cell_;
  RatMatrix inner_;
  std::size_t one_ = 0;
  std::vector<std::vector<IVec>> zw_;
  std::vector<std::vector<RVec>> gzw_;
  std::vector<std::size_t> basis_;
  RatMatrix basis_inv_;
  std::map<IVec, std::size_t> index_;
  Fingerprint fp_;
};

/// gamma with gamma . a = b, if any.
inline std::optional<IMat> equivalent_cells(const FormSpace& V, const KoecherCell& a, const KoecherCell& b) {
  if (a.size() != b.size() || a.dim != b.dim) return std::nullopt;
  CellShape sa(V, a), sb(V, b);
  auto m = sa.maps_to(sb, true);
  if (m.empty()) return std::nullopt;
  return m.front();
}

struct Stabilizer {
  std::vector<IMat> elements;    // full group, identity first
  std::vector<IMat> generators;  // generating set
};

inline Stabilizer stabilizer(const FormSpace& V, const CellShape& shape) {
  auto base = shape.maps_to(shape, false);
  std::set<IMat, bool (*)(const IMat&, const IMat&)> seen(+[](const IMat& x, const IMat& y) {
    return std::lexicographical_compare(x.data().begin(), x.data().end(), y.data().begin(), y.data().end());
  });
  Stabilizer st;
  const IMat id = IMat::identity(V.N());
  st.elements.push_back(id);
  seen.insert(id);
  for (const auto& g : base)
    for (const auto& z : V.roots_of_unity()) {
      IMat h = z * g;
      if (seen.insert(h).second) st.elements.push_back(std::move(h));
    }
  // Greedy generating set: add an element whenever it lies outside the
  // subgroup generated so far.
  std::set<IMat, decltype(seen.key_comp())> sub(seen.key_comp());
  sub.insert(id);
  for (const auto& g : st.elements) {
    if (sub.count(g)) continue;
    st.generators.push_back(g);
    std::vector<IMat> frontier(sub.begin(), sub.end());
    while (!frontier.empty()) {
      std::vector<IMat> next;
      for (const auto& x : frontier)
        for (const auto& gen : st.generators) {
          IMat y = x * gen;
          if (sub.insert(y).second) next.push_back(std::move(y));
        }
      frontier = std::move(next);
    }
  }
  if (sub.size() != st.elements.size()) throw InternalError("stabilizer is not closed under products");
  return st;
}

inline Stabilizer stabilizer(const FormSpace& V, const KoecherCell& c) { return stabilizer(V, CellShape(V, c)); }

}  // namespace vk::voronoi
