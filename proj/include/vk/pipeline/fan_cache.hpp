#pragma once

// On-disk cache of the orbit data of the Voronoi-Koecher fan, one file per
// (field, n). A stale or corrupt file is rebuilt with a warning.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "vk/algebra/catalog.hpp"
#include "vk/core/hash.hpp"
#include "vk/pipeline/ledger.hpp"
#include "vk/voronoi/fan.hpp"
#include "vk/voronoi/fan_io.hpp"

namespace vk::pipeline {

inline constexpr const char* kCacheEnv = "VKT_CACHE_DIR";

/// The --cache argument if given, else $VKT_CACHE_DIR, else <out>/cache.
inline std::filesystem::path resolve_cache_dir(const std::string& flag, const std::string& out_dir) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return std::filesystem::path(out_dir) / "cache";
}

struct CachedFan {
  voronoi::Fan fan;
  std::string hash;  // of the cache file contents
  bool rebuilt = false;
};

inline CachedFan load_or_build_fan(const voronoi::FormSpace& V, const std::filesystem::path& cache_dir,
                                   std::uint64_t catalog_hash, std::ostream& warn = std::cerr) {
  std::filesystem::create_directories(cache_dir);
  const auto path = cache_dir / ("fan-" + V.field().label() + "-n" + std::to_string(V.n()) + ".txt");
  if (std::ifstream is{path}) {
    std::stringstream buf;
    buf << is.rdbuf();
    const std::string text = buf.str();
    try {
      std::istringstream in(text);
      return {voronoi::load_fan(in, V, catalog_hash), hex64(fnv1a64(text)), false};
    } catch (const std::exception& e) {
      warn << "warning: rebuilding fan cache " << path.string() << ": " << e.what() << "\n";
    }
  }
  CachedFan out;
  out.fan = voronoi::cell_complex(V);
  std::ostringstream os;
  voronoi::save_fan(os, out.fan, catalog_hash);
  write_atomically(path, os.str());
  out.hash = hex64(fnv1a64(os.str()));
  out.rebuilt = true;
  return out;
}

}  // namespace vk::pipeline
