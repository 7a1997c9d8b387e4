#pragma once

// A homology run over a range of levels for one group GL_n(O).

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "vk/algebra/catalog.hpp"
#include "vk/algebra/ideal.hpp"
#include "vk/analytics/groups.hpp"
#include "vk/core/error.hpp"

namespace vk::pipeline {

using algebra::OIdeal;

struct JobSpec {
  std::string field;                       // catalog label or alias
  int n = 0;
  Int min_norm = 1;
  Int max_norm = 0;
  std::vector<std::string> explicit_levels;  // HNF strings; replaces the norm range when nonempty
  std::vector<int> degrees;                  // Voronoi degrees; empty means all
  double budget_sec = 0;                     // per level, 0 = unlimited
  std::uint64_t budget_mem = 0;              // bytes per level, 0 = unlimited
  std::string out_dir;
  std::string cache_dir;
  int jobs = 1;
  bool isolate = true;  // run each level in a child process
};

/// Parses "all" or a comma-separated list of integers.
inline std::vector<int> parse_degrees(const std::string& s) {
  std::vector<int> out;
  if (s.empty() || s == "all") return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput("degree '" + tok + "' is not an integer");
    }
  }
  return out;
}

/// Byte count with an optional K, M or G suffix (powers of 1024).
inline std::uint64_t parse_bytes(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw InvalidInput("memory budget '" + s + "' is not a byte count");
  }
  const std::string suffix = s.substr(used);
  if (suffix.empty()) return v;
  if (suffix == "K" || suffix == "k") return v << 10;
  if (suffix == "M" || suffix == "m") return v << 20;
  if (suffix == "G" || suffix == "g") return v << 30;
  throw InvalidInput("memory budget '" + s + "' has unknown suffix '" + suffix + "'");
}

/// Checks the spec against the catalog and fills the default degree list.
inline JobSpec validated(JobSpec spec, const algebra::Catalog& catalog) {
  auto F = catalog.field(spec.field);
  if (spec.n < 1) throw InvalidInput("--n must be positive");
  if (F->class_number() != 1) throw InvalidInput("field " + F->label() + " has class number > 1; only principal levels are supported");
  if (!F->has_involution()) throw InvalidInput("field " + F->label() + " has no Voronoi-Koecher fan here (no CM involution)");
  if (spec.min_norm < 1 || (spec.explicit_levels.empty() && spec.max_norm < 0))
    throw InvalidInput("norm bounds must be positive");
  const int d = analytics::symmetric_space_dim(*F, spec.n);
  if (spec.degrees.empty())
    for (int k = 0; k <= d; ++k) spec.degrees.push_back(k);
  std::sort(spec.degrees.begin(), spec.degrees.end());
  spec.degrees.erase(std::unique(spec.degrees.begin(), spec.degrees.end()), spec.degrees.end());
  for (int k : spec.degrees)
    if (k < 0 || k > d) throw InvalidInput("degree " + std::to_string(k) + " outside [0, " + std::to_string(d) + "]");
  if (spec.jobs < 1) throw InvalidInput("--jobs must be positive");
  if (spec.budget_sec < 0) throw InvalidInput("--budget-sec must be nonnegative");
  if (spec.out_dir.empty()) throw InvalidInput("--out is required");
  return spec;
}

/// Levels of the run in norm order, then HNF order.
inline std::vector<OIdeal> levels_of(const JobSpec& spec, const algebra::NumberField& F) {
  std::vector<OIdeal> out;
  if (!spec.explicit_levels.empty()) {
    for (const auto& s : spec.explicit_levels) out.push_back(OIdeal::parse_hnf(F, s));
  } else {
    out = algebra::ideals_of_norm_between(F, spec.min_norm, spec.max_norm);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace vk::pipeline
