#pragma once

// Faces of a pointed polyhedral cone given by generating rays in Z^D.
// Facets are found by gift wrapping inside the linear span of the face:
// start from a positive functional, rotate it onto a first facet, then cross
// every ridge to the adjacent facet. Ridges are facets of facets, computed
// recursively and memoized per face.

#include <gmpxx.h>

#include <boost/dynamic_bitset.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"

namespace vk::voronoi {

using Bits = boost::dynamic_bitset<>;
using IVec = std::vector<Int>;
using RVec = std::vector<Rat>;

/// Coordinates inside the linear span of a set of vectors, relative to a
/// basis formed by the first independent ones.
class SpanFrame {
 public:
  SpanFrame() = default;
  SpanFrame(const std::vector<IVec>& vectors, const std::vector<std::size_t>& candidates) {
    if (candidates.empty()) return;
    const std::size_t D = vectors[candidates.front()].size();
    // Pivot columns of the matrix with the candidates as columns are the
    // first independent candidates.
    RatMatrix cols(D, candidates.size());
    for (std::size_t j = 0; j < candidates.size(); ++j)
      for (std::size_t i = 0; i < D; ++i) cols(i, j) = vectors[candidates[j]][i];
    std::vector<std::vector<Rat>> acc;
    for (auto c : rref(cols)) {
      basis_.push_back(candidates[c]);
      acc.emplace_back(vectors[candidates[c]].begin(), vectors[candidates[c]].end());
    }
    const std::size_t m = basis_.size();
    // Pivot coordinates: m ambient rows where the basis matrix is invertible.
    RatMatrix bt(m, D);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < D; ++c) bt(r, c) = acc[r][c];
    pivots_ = rref(bt);
    RatMatrix sq(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sq(i, j) = acc[j][pivots_[i]];
    inv_ = inverse(sq);
  }

  std::size_t dim() const { return basis_.size(); }
  const std::vector<std::size_t>& basis() const { return basis_; }

  /// Coordinates of a vector assumed to lie in the span.
  RVec coords(const IVec& v) const {
    const std::size_t m = basis_.size();
    RVec out(m, Rat(0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out[i] += inv_(i, j) * v[pivots_[j]];
    return out;
  }

  static RatMatrix inverse(const RatMatrix& a) {
    const std::size_t m = a.rows();
    RatMatrix aug(m, 2 * m, Rat(0));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) aug(i, j) = a(i, j);
      aug(i, m + i) = 1;
    }
    auto piv = rref(aug);
    if (piv.size() < m || (m > 0 && piv[m - 1] >= m)) throw InternalError("singular span basis");
    RatMatrix inv(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) inv(i, j) = aug(i, m + j);
    return inv;
  }

 private:
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> pivots_;
  RatMatrix inv_;
};

inline Rat dotr(const RVec& a, const RVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline int sign_of(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

/// Sign of the determinant of square rational data given as columns.
inline int det_sign(const std::vector<RVec>& cols) {
  const std::size_t m = cols.size();
  RatMatrix a(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) a(i, j) = cols[j][i];
  return sign_of(determinant(a));
}

struct Facet {
  Bits rays;
  RVec normal;  // in the coordinates of the face's SpanFrame
};

class ConeFaces {
 public:
  /// rays: generators in Z^D; positive: a functional positive on every ray.
  ConeFaces(std::vector<IVec> rays, RVec positive) : rays_(std::move(rays)), positive_(std::move(positive)) {
    for (const auto& r : rays_)
      if (dotr(positive_, RVec(r.begin(), r.end())) <= 0)
        throw InvalidInput("cone is not pointed with respect to the given functional");
  }

  std::size_t size() const { return rays_.size(); }
  const std::vector<IVec>& rays() const { return rays_; }
  Bits all() const { return Bits(rays_.size()).set(); }

  SpanFrame frame(const Bits& face) const { return SpanFrame(rays_, members(face)); }

  std::size_t dim(const Bits& face) const { return frame(face).dim(); }

  /// Facets of the sub-cone spanned by the rays in face.
  const std::vector<Facet>& facets(const Bits& face) {
    auto it = memo_.find(face);
    if (it != memo_.end()) return it->second;
    auto res = compute(face);
    return memo_.emplace(face, std::move(res)).first->second;
  }

  /// Facet normals of a full-dimensional cone, as ambient functionals.
  std::vector<std::pair<Bits, RVec>> ambient_facets() {
    const Bits top = all();
    SpanFrame fr = frame(top);
    const std::size_t D = rays_.front().size();
    if (fr.dim() != D) throw InvalidInput("cone is not full-dimensional");
    // phi_i = f . b_i  =>  f = B^{-T} phi
    RatMatrix bt(D, D);
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) bt(i, j) = rays_[fr.basis()[i]][j];
    RatMatrix inv = SpanFrame::inverse(bt);
    std::vector<std::pair<Bits, RVec>> out;
    for (const auto& f : facets(top)) {
      RVec amb(D, Rat(0));
      for (std::size_t j = 0; j < D; ++j)
        for (std::size_t i = 0; i < D; ++i) amb[j] += inv(j, i) * f.normal[i];
      out.emplace_back(f.rays, amb);
    }
    return out;
  }

 private:
  std::vector<std::size_t> members(const Bits& b) const {
    std::vector<std::size_t> m;
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) m.push_back(i);
    return m;
  }

  // Basis of {phi : phi . y = 0 for y in ys} in Q^m.
  static std::vector<RVec> annihilator(const std::vector<RVec>& ys, std::size_t m) {
    RatMatrix a(ys.size(), m);
    for (std::size_t i = 0; i < ys.size(); ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = ys[i][j];
    return nullspace(a);
  }

  static bool proportional(const RVec& a, const RVec& b) {
    RatMatrix m(2, a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      m(0, j) = a[j];
      m(1, j) = b[j];
    }
    return rank(m) < 2;
  }

  std::vector<Facet> compute(const Bits& face) {
    const auto idx = members(face);
    SpanFrame fr(rays_, idx);
    const std::size_t m = fr.dim();
    if (m == 0) return {};
    if (m == 1) return {Facet{Bits(rays_.size()), RVec{Rat(1)}}};
    std::vector<RVec> y(rays_.size());
    for (auto i : idx) y[i] = fr.coords(rays_[i]);
    if (idx.size() == m) {
      // Simplicial: drop one ray at a time; the dual basis gives the normals.
      std::vector<Facet> out;
      for (std::size_t j = 0; j < m; ++j) {
        Facet f{face, RVec(m, Rat(0))};
        f.rays.reset(fr.basis()[j]);
        f.normal[j] = 1;
        out.push_back(std::move(f));
      }
      std::sort(out.begin(), out.end(), [](const Facet& a, const Facet& b) { return a.rays < b.rays; });
      return out;
    }
    auto zero_set = [&](const RVec& f) {
      Bits z(rays_.size());
      for (auto i : idx)
        if (dotr(f, y[i]) == 0) z.set(i);
      return z;
    };
    auto ys_of = [&](const Bits& b) {
      std::vector<RVec> v;
      for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) v.push_back(y[i]);
      return v;
    };
    auto rank_of = [&](const Bits& b) {
      auto v = ys_of(b);
      if (v.empty()) return std::size_t(0);
      RatMatrix a(v.size(), m);
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = v[i][j];
      return rank(a);
    };

    // Positive functional in span coordinates.
    RVec f(m);
    for (std::size_t j = 0; j < m; ++j) f[j] = dotr(positive_, RVec(rays_[fr.basis()[j]].begin(), rays_[fr.basis()[j]].end()));
    Bits z = zero_set(f);
    while (rank_of(z) + 1 < m) {
      auto ann = annihilator(ys_of(z), m);
      std::optional<RVec> h;
      for (auto& a : ann)
        if (!proportional(a, f)) {
          h = a;
          break;
        }
      if (!h) throw InternalError("facet search found no rotation direction");
      bool any_pos = false;
      for (auto i : idx)
        if (!z.test(i) && dotr(*h, y[i]) > 0) any_pos = true;
      if (!any_pos)
        for (auto& x : *h) x = -x;
      std::optional<Rat> lambda;
      for (auto i : idx) {
        if (z.test(i)) continue;
        Rat hv = dotr(*h, y[i]);
        if (hv <= 0) continue;
        Rat t = dotr(f, y[i]) / hv;
        if (!lambda || t < *lambda) lambda = t;
      }
      if (!lambda) throw InternalError("facet search is degenerate");
      for (std::size_t j = 0; j < m; ++j) f[j] -= *lambda * (*h)[j];
      z = zero_set(f);
    }

    std::vector<Facet> out;
    std::map<Bits, std::size_t> seen;
    std::vector<std::size_t> queue;
    seen.emplace(z, 0);
    out.push_back({z, f});
    queue.push_back(0);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const Bits F = out[queue[qi]].rays;
      const RVec fn = out[queue[qi]].normal;
      // Copy: the recursive call may rehash memo_.
      const std::vector<Facet> ridges = facets(F);
      for (const auto& ridge : ridges) {
        auto ann = annihilator(ys_of(ridge.rays), m);
        std::optional<RVec> g;
        for (auto& a : ann)
          if (!proportional(a, fn)) {
            g = a;
            break;
          }
        if (!g) throw InternalError("ridge with one-dimensional annihilator");
        // Orient g positively on F \ ridge.
        for (auto i = F.find_first(); i != Bits::npos; i = F.find_next(i)) {
          if (ridge.rays.test(i)) continue;
          if (dotr(*g, y[i]) < 0)
            for (auto& x : *g) x = -x;
          break;
        }
        std::optional<Rat> beta;
        for (auto i : idx) {
          if (F.test(i)) continue;
          Rat t = dotr(*g, y[i]) / dotr(fn, y[i]);
          if (!beta || t < *beta) beta = t;
        }
        if (!beta) throw InternalError("cone has a single facet");
        RVec g2(m);
        for (std::size_t j = 0; j < m; ++j) g2[j] = (*g)[j] - *beta * fn[j];
        Bits F2 = zero_set(g2);
        if (seen.count(F2)) continue;
        seen.emplace(F2, out.size());
        queue.push_back(out.size());
        out.push_back({F2, g2});
      }
    }
    for (const auto& fc : out)
      if (rank_of(fc.rays) + 1 != m) throw InternalError("facet of wrong dimension");
    std::sort(out.begin(), out.end(), [](const Facet& a, const Facet& b) { return a.rays < b.rays; });
    return out;
  }

  std::vector<IVec> rays_;
  RVec positive_;
  std::map<Bits, std::vector<Facet>> memo_;
};

}  // namespace vk::voronoi
