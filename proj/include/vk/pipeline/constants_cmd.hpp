#pragma once

// The `constants` command: invariants of GL_n(O) and its limit constant as
// key=value lines.

#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <utility>

#include "vk/algebra/catalog.hpp"
#include "vk/analytics/constants.hpp"
#include "vk/analytics/groups.hpp"
#include "vk/core/error.hpp"

namespace vk::pipeline {

/// "GL<n>/<field>" or "GL<n>(Z)", e.g. GL3/Q, GL2/Q(i), GL2/cubic-23.
inline std::pair<std::string, int> parse_group(const std::string& s) {
  static const std::regex slash(R"(GL_?(\d+)/(.+))"), integral(R"(GL_?(\d+)\(Z\))");
  std::smatch m;
  if (std::regex_match(s, m, slash)) return {m[2], std::stoi(m[1])};
  if (std::regex_match(s, m, integral)) return {"Q", std::stoi(m[1])};
  throw InvalidInput("group '" + s + "' is not of the form GL<n>/<field>");
}

inline void cmd_constants(std::ostream& os, const algebra::NumberField& F, int n, int digits = 20) {
  const auto g = analytics::describe_group(F, n);
  std::string primes;
  for (auto p : g.torsion_primes) primes += (primes.empty() ? "" : ",") + std::to_string(p);
  os << "# GL_" << n << " over " << F.label() << ": deficiency " << g.deficiency << ", symmetric space dimension "
     << g.sym_dim << "\n";
  os << "group=" << g.name() << "\n";
  os << "field=" << F.label() << "\n";
  os << "n=" << n << "\n";
  os << "signature=" << g.r << "," << g.s << "\n";
  os << "d=" << g.sym_dim << "\n";
  os << "deficiency=" << g.deficiency << "\n";
  os << "torsion_primes=" << primes << "\n";
  os << "vcd_voronoi_degree=" << g.vcd_voronoi_degree << "\n";
  os << "cuspidal_top_voronoi_degree=" << g.cuspidal_top_voronoi_degree << "\n";
  if (g.deficiency != 1) {
    os << "note=conjecturally zero: the limit of log|H_tors|/index vanishes unless deficiency = 1\n";
    return;
  }
  try {
    const auto c = analytics::bv_limit(F, n, digits);
    std::ostringstream v;
    v << std::setprecision(digits) << c.value;
    os << "bv_limit=" << v.str() << "\n";
    os << "bv_limit_error=" << std::setprecision(3) << c.error_bound << "\n";
  } catch (const InvalidInput& e) {
    os << "note=" << e.what() << "\n";
  }
}

}  // namespace vk::pipeline
