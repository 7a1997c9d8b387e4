#pragma once

// Fan cache: a line-oriented text record of the orbit data of a fan.
//
//   vkfan 1
//   field <label> hash <hex> n <n> D <D>
//   perfect <count>
//   form <D coords> neighbors <k> <k indices>
//   dim <k> orbits <m>
//   orbit <rays p>
//   rep <N entries>                      (p lines)
//   stab <count> gens <g> <g indices>
//   elem <sign> <N*N entries>            (count lines)
//   facets <f>
//   facet <orbit> <sign> <bitstring> <N*N entries>   (f lines)
//   end

#include <gmpxx.h>

#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "vk/core/error.hpp"
#include "vk/voronoi/fan.hpp"

namespace vk::voronoi {

namespace fan_io_detail {

inline void write_vec(std::ostream& os, const std::vector<Int>& v) {
  for (const auto& x : v) os << ' ' << x;
}

inline void write_mat(std::ostream& os, const IMat& m) {
  for (const auto& x : m.data()) os << ' ' << x;
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::istringstream line(const std::string& tag) {
    std::string l;
    if (!std::getline(is_, l)) fail("unexpected end of file, expected '" + tag + "'");
    ++lineno_;
    std::istringstream ss(l);
    std::string t;
    ss >> t;
    if (t != tag) fail("expected '" + tag + "', found '" + t + "'");
    return ss;
  }

  template <class T>
  T get(std::istringstream& ss, const std::string& what) {
    T v;
    if (!(ss >> v)) fail("malformed " + what);
    return v;
  }

  void keyword(std::istringstream& ss, const std::string& k) {
    std::string t;
    if (!(ss >> t) || t != k) fail("expected keyword '" + k + "'");
  }

  IVec vec(std::istringstream& ss, std::size_t n, const std::string& what) {
    IVec v(n);
    for (auto& x : v) x = get<Int>(ss, what);
    return v;
  }

  IMat mat(std::istringstream& ss, std::size_t n, const std::string& what) {
    IMat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = get<Int>(ss, what);
    return m;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("fan cache line " + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& is_;
  std::size_t lineno_ = 0;
};

}  // namespace fan_io_detail

inline void save_fan(std::ostream& os, const Fan& fan, std::uint64_t catalog_hash) {
  using namespace fan_io_detail;
  os << "vkfan 1\n";
  os << "field " << fan.field << " hash " << std::hex << catalog_hash << std::dec << " n " << fan.n << " D " << fan.D
     << "\n";
  os << "perfect " << fan.perfect.size() << "\n";
  for (const auto& pf : fan.perfect) {
    os << "form";
    for (const auto& x : pf.coords) os << ' ' << x;
    os << " neighbors " << pf.neighbors.size();
    for (auto i : pf.neighbors) os << ' ' << i;
    os << "\n";
  }
  for (std::size_t k = 0; k < fan.by_dim.size(); ++k) {
    os << "dim " << k << " orbits " << fan.by_dim[k].size() << "\n";
    for (const auto& o : fan.by_dim[k]) {
      os << "orbit " << o.cell.size() << "\n";
      for (const auto& w : o.cell.reps) {
        os << "rep";
        write_vec(os, w);
        os << "\n";
      }
      std::vector<std::size_t> gens;
      for (const auto& g : o.stab.generators)
        for (std::size_t i = 0; i < o.stab.elements.size(); ++i)
          if (o.stab.elements[i] == g) {
            gens.push_back(i);
            break;
          }
      os << "stab " << o.stab.elements.size() << " gens " << gens.size();
      for (auto i : gens) os << ' ' << i;
      os << "\n";
      for (std::size_t i = 0; i < o.stab.elements.size(); ++i) {
        os << "elem " << o.stab_sign[i];
        write_mat(os, o.stab.elements[i]);
        os << "\n";
      }
      os << "facets " << o.facets.size() << "\n";
      for (const auto& f : o.facets) {
        std::string bits;
        boost::to_string(f.rays, bits);
        os << "facet " << f.orbit << ' ' << f.sign << ' ' << bits;
        write_mat(os, f.map);
        os << "\n";
      }
    }
  }
  os << "end\n";
}

/// Reads a fan cache; throws ConfigError when it is malformed, stale or
/// belongs to a different (field, n).
inline Fan load_fan(std::istream& is, const FormSpace& V, std::uint64_t catalog_hash) {
  using namespace fan_io_detail;
  Reader r(is);
  {
    auto ss = r.line("vkfan");
    if (r.get<int>(ss, "version") != 1) r.fail("unsupported version");
  }
  Fan fan;
  {
    auto ss = r.line("field");
    fan.field = r.get<std::string>(ss, "label");
    r.keyword(ss, "hash");
    std::string hex = r.get<std::string>(ss, "hash");
    r.keyword(ss, "n");
    fan.n = r.get<int>(ss, "n");
    r.keyword(ss, "D");
    fan.D = r.get<int>(ss, "D");
    if (fan.field != V.field().label() || fan.n != V.n() || fan.D != V.D()) r.fail("cache is for a different group");
    if (std::stoull(hex, nullptr, 16) != catalog_hash) r.fail("stale cache: catalog entry changed");
  }
  const std::size_t N = V.N();
  {
    auto ss = r.line("perfect");
    auto count = r.get<std::size_t>(ss, "count");
    for (std::size_t i = 0; i < count; ++i) {
      auto fs = r.line("form");
      RVec c(V.D());
      for (auto& x : c) x = r.get<Rat>(fs, "coordinate");
      r.keyword(fs, "neighbors");
      PerfectForm pf = make_perfect_form(V, c);
      auto k = r.get<std::size_t>(fs, "count");
      for (std::size_t j = 0; j < k; ++j) pf.neighbors.push_back(r.get<std::size_t>(fs, "neighbor"));
      fan.perfect.push_back(std::move(pf));
    }
  }
  fan.by_dim.assign(V.D(), {});
  for (int k = 0; k < V.D(); ++k) {
    auto ds = r.line("dim");
    if (r.get<int>(ds, "dimension") != k) r.fail("dimensions out of order");
    r.keyword(ds, "orbits");
    auto m = r.get<std::size_t>(ds, "count");
    for (std::size_t oi = 0; oi < m; ++oi) {
      CellOrbit o;
      auto os = r.line("orbit");
      auto p = r.get<std::size_t>(os, "ray count");
      std::vector<IVec> ws;
      for (std::size_t i = 0; i < p; ++i) {
        auto rs = r.line("rep");
        ws.push_back(r.vec(rs, N, "representative"));
      }
      o.cell = make_cell(V, ws);
      if (o.cell.reps != ws || o.cell.dim != k) r.fail("cell representatives are not normalized");
      auto ss = r.line("stab");
      auto count = r.get<std::size_t>(ss, "stabilizer order");
      r.keyword(ss, "gens");
      auto g = r.get<std::size_t>(ss, "generator count");
      std::vector<std::size_t> gens;
      for (std::size_t i = 0; i < g; ++i) gens.push_back(r.get<std::size_t>(ss, "generator"));
      for (std::size_t i = 0; i < count; ++i) {
        auto es = r.line("elem");
        int sign = r.get<int>(es, "sign");
        o.stab.elements.push_back(r.mat(es, N, "stabilizer element"));
        o.stab_sign.push_back(sign);
        if (sign < 0) o.orientable = false;
      }
      for (auto i : gens) {
        if (i >= count) r.fail("generator index out of range");
        o.stab.generators.push_back(o.stab.elements[i]);
      }
      auto fs = r.line("facets");
      auto f = r.get<std::size_t>(fs, "facet count");
      for (std::size_t i = 0; i < f; ++i) {
        auto ls = r.line("facet");
        FaceLink link;
        link.orbit = r.get<std::size_t>(ls, "facet orbit");
        link.sign = r.get<int>(ls, "facet sign");
        auto bits = r.get<std::string>(ls, "facet rays");
        if (bits.size() != p) r.fail("facet ray mask has wrong length");
        link.rays = Bits(bits);
        link.map = r.mat(ls, N, "facet map");
        o.facets.push_back(std::move(link));
      }
      fan.by_dim[k].push_back(std::move(o));
    }
  }
  r.line("end");
  for (int k = 1; k < V.D(); ++k)
    for (std::size_t oi = 0; oi < fan.by_dim[k].size(); ++oi)
      for (std::size_t f = 0; f < fan.by_dim[k][oi].facets.size(); ++f) {
        auto t = fan.by_dim[k][oi].facets[f].orbit;
        if (t >= fan.by_dim[k - 1].size()) r.fail("facet orbit index out of range");
        fan.by_dim[k - 1][t].cofaces.emplace_back(oi, f);
      }
  return fan;
}

}  // namespace vk::voronoi
