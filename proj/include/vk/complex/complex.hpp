#pragma once

// The Voronoi complex of Gamma_0(level). A GL_n(O)-orbit of cells with
// representative sigma splits into Gamma_0-orbits indexed by the points of
// P^{n-1}(O/level) modulo the right action of Stab(sigma). The oriented cell
// g.sigma is written [x] with x the coset of g, subject to [x s] = chi(s) [x]
// for s in Stab(sigma); an orbit on which this forces [x] = -[x] is dropped.
// The boundary is d[x]_sigma = sum over facets f of eps_f [x h_f]_tau, where
// the facet equals h_f . tau.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "vk/complex/cosets.hpp"
#include "vk/core/error.hpp"
#include "vk/exactla/homology.hpp"
#include "vk/exactla/sparse.hpp"
#include "vk/voronoi/fan.hpp"

namespace vk::complex {

using exactla::SparseIntMatrix;
using voronoi::Fan;
using voronoi::FormSpace;
using voronoi::IMat;

struct Generator {
  std::size_t orbit = 0;  // cell orbit within its dimension
  std::size_t point = 0;  // coset point of the representative
};

struct VoronoiComplex {
  std::string field;
  int n = 0;
  std::string level_hnf;
  Int level_norm;
  std::size_t index = 0;                     // number of coset points
  std::vector<std::vector<Generator>> gens;  // gens[k]: generators in dimension k
  std::vector<SparseIntMatrix> d;            // d[k]: V_k -> V_{k-1}; d[0] has no rows

  int top() const { return static_cast<int>(gens.size()) - 1; }
  std::size_t rank(int k) const { return k >= 0 && k <= top() ? gens[k].size() : 0; }

  /// d_k, with zero maps outside the range of the complex.
  SparseIntMatrix boundary(int k) const {
    if (k >= 0 && k <= top()) return d[k];
    if (k == top() + 1) return SparseIntMatrix(rank(top()), 0);
    return SparseIntMatrix(rank(k - 1), rank(k));
  }
};

/// Signed identification of every (orbit, point) pair with a generator.
struct OrbitTable {
  std::vector<std::int64_t> gen;  // generator index, or -1 when killed
  std::vector<int> sign;          // [x] = sign * generator
};

struct AssembleOptions {
  /// Recompute the boundary at every point of each Stab-orbit and compare.
  bool check_equivariance = false;
};

namespace detail {

using PermCache = std::map<std::vector<Int>, std::vector<std::uint32_t>>;

inline const std::vector<std::uint32_t>& permutation_of(const FormSpace& V, const CosetSpace& X, const IMat& g,
                                                        PermCache& cache) {
  auto it = cache.find(g.data());
  if (it == cache.end()) it = cache.emplace(g.data(), X.permutation(V.to_o_matrix(g))).first;
  return it->second;
}

/// Sorted column with duplicate rows summed and zeros removed.
inline SparseIntMatrix::Column canonical(SparseIntMatrix::Column col) {
  std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseIntMatrix::Column out;
  for (auto& e : col) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(std::move(e));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const auto& e) { return e.second == 0; }), out.end());
  return out;
}

}  // namespace detail

inline VoronoiComplex assemble_complex(const FormSpace& V, const Fan& fan, const CosetSpace& X,
                                       const AssembleOptions& opt = {}) {
  if (fan.field != V.field().label() || fan.n != V.n() || X.n() != V.n() || X.field().label() != fan.field)
    throw InvalidInput("fan, form space and coset space disagree on the group");
  VoronoiComplex c;
  c.field = fan.field;
  c.n = fan.n;
  c.level_hnf = X.level().hnf_string();
  c.level_norm = X.level().norm();
  c.index = X.size();
  const int K = static_cast<int>(fan.by_dim.size());
  c.gens.assign(K, {});
  c.d.resize(K);
  detail::PermCache cache;
  std::vector<std::vector<OrbitTable>> tables(K);

  for (int k = 0; k < K; ++k) {
    for (std::size_t oi = 0; oi < fan.by_dim[k].size(); ++oi) {
      const auto& o = fan.by_dim[k][oi];
      std::vector<std::pair<std::vector<std::uint32_t>, int>> gens;
      for (const auto& g : o.stab.generators) {
        int chi = 0;
        for (std::size_t e = 0; e < o.stab.elements.size(); ++e)
          if (o.stab.elements[e] == g) chi = o.stab_sign[e];
        if (chi == 0) throw InternalError("stabilizer generator missing from the element list");
        gens.emplace_back(detail::permutation_of(V, X, g, cache), chi);
      }
      OrbitTable t;
      t.gen.assign(X.size(), -2);
      t.sign.assign(X.size(), 0);
      std::vector<std::size_t> members;
      for (std::size_t x0 = 0; x0 < X.size(); ++x0) {
        if (t.gen[x0] != -2) continue;
        members.assign(1, x0);
        t.sign[x0] = 1;
        t.gen[x0] = -3;
        bool killed = false;
        for (std::size_t qi = 0; qi < members.size(); ++qi) {
          const auto y = members[qi];
          for (const auto& [perm, chi] : gens) {
            const auto z = perm[y];
            const int s = t.sign[y] * chi;
            if (t.gen[z] == -2) {
              t.gen[z] = -3;
              t.sign[z] = s;
              members.push_back(z);
            } else if (t.sign[z] != s) {
              killed = true;
            }
          }
        }
        std::int64_t id = -1;
        if (!killed) {
          id = static_cast<std::int64_t>(c.gens[k].size());
          c.gens[k].push_back({oi, x0});
        }
        for (auto y : members) {
          t.gen[y] = id;
          if (killed) t.sign[y] = 0;
        }
      }
      tables[k].push_back(std::move(t));
    }
  }

  auto column = [&](int k, std::size_t oi, std::size_t x) {
    SparseIntMatrix::Column col;
    for (const auto& f : fan.by_dim[k][oi].facets) {
      const auto& perm = detail::permutation_of(V, X, f.map, cache);
      const auto y = perm[x];
      const auto& t = tables[k - 1][f.orbit];
      if (t.gen[y] < 0) continue;
      col.emplace_back(static_cast<std::uint32_t>(t.gen[y]), Int(f.sign * t.sign[y]));
    }
    return col;
  };

  c.d[0] = SparseIntMatrix(0, c.gens[0].size());
  for (int k = 1; k < K; ++k) {
    SparseIntMatrix m(c.gens[k - 1].size(), c.gens[k].size());
    for (std::size_t j = 0; j < c.gens[k].size(); ++j) {
      const auto& g = c.gens[k][j];
      auto col = column(k, g.orbit, g.point);
      if (opt.check_equivariance) {
        const auto& t = tables[k][g.orbit];
        auto ref = detail::canonical(col);
        for (std::size_t x = 0; x < X.size(); ++x) {
          if (t.gen[x] != static_cast<std::int64_t>(j)) continue;
          auto other = column(k, g.orbit, x);
          for (auto& e : other) e.second *= t.sign[x];
          if (detail::canonical(std::move(other)) != ref)
            throw InternalError("boundary is not compatible with the stabilizer action in dimension " +
                                std::to_string(k));
        }
      }
      m.set_column(j, std::move(col));
    }
    c.d[k] = std::move(m);
  }
  for (int k = 2; k < K; ++k)
    if (!exactla::multiply(c.d[k - 1], c.d[k]).is_zero())
      throw InternalError("d_" + std::to_string(k - 1) + " d_" + std::to_string(k) + " != 0 for " + c.field +
                          " level " + c.level_hnf);
  return c;
}

/// Integral homology of the Voronoi complex in dimension k.
inline exactla::HomologyResult voronoi_homology(const VoronoiComplex& c, int k,
                                                const exactla::HomologyOptions& opt = {}) {
  return exactla::homology_of_pair(c.boundary(k), c.boundary(k + 1), opt);
}

}  // namespace vk::complex
