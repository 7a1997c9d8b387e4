#pragma once

// The Koecher fan modulo GL_n(O): orbits of cells meeting the positive cone,
// from the perfect pyramids down to the smallest cells, with stabilizers,
// orientation characters and signed incidences.

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/voronoi/cell.hpp"
#include "vk/voronoi/cone.hpp"
#include "vk/voronoi/form_space.hpp"
#include "vk/voronoi/perfect.hpp"

namespace vk::voronoi {

/// A facet of an orbit representative: the cell map . rep(orbit).
struct FaceLink {
  std::size_t orbit = 0;  // orbit index in the next lower dimension
  IMat map;
  int sign = 1;  // incidence number for the reference orientations
  Bits rays;     // rays of the parent cell lying on the facet
};

struct CellOrbit {
  KoecherCell cell;
  Stabilizer stab;
  std::vector<int> stab_sign;  // orientation character on stab.elements
  bool orientable = true;      // no stabilizer element reverses orientation
  std::vector<FaceLink> facets;
  std::vector<std::pair<std::size_t, std::size_t>> cofaces;  // (parent orbit, facet index)
};

struct Fan {
  std::string field;
  int n = 0;
  int D = 0;
  std::vector<PerfectForm> perfect;
  std::vector<std::vector<CellOrbit>> by_dim;  // by_dim[k]: orbits of cells of dimension k

  int top_dim() const { return D - 1; }
  int min_dim() const {
    for (std::size_t k = 0; k < by_dim.size(); ++k)
      if (!by_dim[k].empty()) return static_cast<int>(k);
    return -1;
  }
  std::size_t orbit_count(int k) const {
    return k >= 0 && k < static_cast<int>(by_dim.size()) ? by_dim[k].size() : 0;
  }
};

/// Reference orientation: ordered basis of the cell's span given by its
/// first independent rays.
inline SpanFrame reference_frame(const KoecherCell& c) {
  std::vector<std::size_t> all(c.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return SpanFrame(c.rays, all);
}

/// Sign of the action of gamma on the reference orientation of a cell it stabilizes.
inline int orientation_character(const FormSpace& V, const KoecherCell& c, const IMat& gamma) {
  if (transform_cell(V, gamma, c).rays != c.rays)
    throw InvalidInput("element does not stabilize " + c.describe());
  SpanFrame fr = reference_frame(c);
  std::vector<RVec> cols;
  for (auto b : fr.basis()) cols.push_back(fr.coords(V.ray(mat_vec(gamma, c.reps[b]))));
  return det_sign(cols);
}

struct FanOptions {
  WalkOptions walk;
};

inline Fan cell_complex(const FormSpace& V, const FanOptions& opt = {}) {
  Fan fan;
  fan.field = V.field().label();
  fan.n = V.n();
  fan.D = V.D();
  fan.perfect = enumerate_perfect_forms(V, opt.walk);
  fan.by_dim.assign(V.D(), {});
  const RVec positive = V.identity_form();

  std::vector<std::vector<CellShape>> shapes(V.D());
  std::vector<std::map<Fingerprint, std::vector<std::size_t>>> buckets(V.D());
  auto add_orbit = [&](int k, KoecherCell c) {
    CellShape sh(V, c);
    CellOrbit o;
    o.cell = std::move(c);
    o.stab = stabilizer(V, sh);
    for (const auto& g : o.stab.elements) {
      int s = orientation_character(V, o.cell, g);
      o.stab_sign.push_back(s);
      if (s < 0) o.orientable = false;
    }
    buckets[k][sh.fingerprint()].push_back(fan.by_dim[k].size());
    fan.by_dim[k].push_back(std::move(o));
    shapes[k].push_back(std::move(sh));
    return fan.by_dim[k].size() - 1;
  };

  for (const auto& pf : fan.perfect) add_orbit(V.D() - 1, pf.pyramid);

  for (int k = V.D() - 1; k >= 1; --k) {
    for (std::size_t oi = 0; oi < fan.by_dim[k].size(); ++oi) {
      const KoecherCell parent = fan.by_dim[k][oi].cell;
      const SpanFrame pframe = reference_frame(parent);
      ConeFaces cone(parent.rays, positive);
      std::vector<FaceLink> links;
      for (const auto& facet : cone.facets(cone.all())) {
        KoecherCell child = sub_cell(V, parent, facet.rays);
        if (child.dim != k - 1) throw InternalError("facet of wrong dimension in " + parent.describe());
        if (!V.spans(child.reps)) continue;
        CellShape sh(V, child);
        std::optional<std::size_t> orbit;
        IMat map;
        for (auto j : buckets[k - 1][sh.fingerprint()]) {
          auto m = shapes[k - 1][j].maps_to(sh, true);
          if (!m.empty()) {
            orbit = j;
            map = m.front();
            break;
          }
        }
        if (!orbit) {
          orbit = add_orbit(k - 1, child);
          map = IMat::identity(V.N());
        }
        // Orientation of the parent induced by (inward ray, image of the
        // facet's reference basis).
        const KoecherCell& rep = fan.by_dim[k - 1][*orbit].cell;
        const SpanFrame cframe = reference_frame(rep);
        std::vector<RVec> cols;
        for (std::size_t i = 0; i < parent.size(); ++i)
          if (!facet.rays.test(i)) {
            cols.push_back(pframe.coords(parent.rays[i]));
            break;
          }
        for (auto b : cframe.basis()) cols.push_back(pframe.coords(V.ray(mat_vec(map, rep.reps[b]))));
        const int sign = det_sign(cols);
        if (sign == 0) throw InternalError("degenerate incidence in " + parent.describe());
        links.push_back({*orbit, map, sign, facet.rays});
      }
      for (std::size_t f = 0; f < links.size(); ++f) fan.by_dim[k - 1][links[f].orbit].cofaces.emplace_back(oi, f);
      fan.by_dim[k][oi].facets = std::move(links);
    }
  }
  return fan;
}

}  // namespace vk::voronoi
