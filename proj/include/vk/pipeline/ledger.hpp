#pragma once

// Run ledger: one entry per level with its status, timing, peak memory, the
// hash of the inputs it was computed from, and its CSV rows. Stored as JSON
// next to the CSV and rewritten atomically after every level.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vk/core/error.hpp"

namespace vk::pipeline {

enum class LevelStatus { pending, done, skipped_budget, failed };

inline std::string to_string(LevelStatus s) {
  switch (s) {
    case LevelStatus::pending:
      return "pending";
    case LevelStatus::done:
      return "done";
    case LevelStatus::skipped_budget:
      return "skipped-budget";
    case LevelStatus::failed:
      return "failed";
  }
  return "?";
}

inline LevelStatus parse_status(const std::string& s) {
  if (s == "pending") return LevelStatus::pending;
  if (s == "done") return LevelStatus::done;
  if (s == "skipped-budget") return LevelStatus::skipped_budget;
  if (s == "failed") return LevelStatus::failed;
  throw ConfigError("unknown ledger status '" + s + "'");
}

struct LevelEntry {
  std::string level_hnf;
  std::string level_norm;
  LevelStatus status = LevelStatus::pending;
  std::string job_hash;
  double seconds = 0;
  std::uint64_t peak_kb = 0;
  double budget_sec = 0;
  std::uint64_t budget_mem = 0;
  std::string message;
  std::vector<std::string> rows;  // CSV rows without newline, one per degree
};

struct RunLedger {
  std::string group;
  std::string field;
  int n = 0;
  std::vector<int> degrees;
  std::string catalog_hash;
  std::string fan_hash;
  std::vector<LevelEntry> levels;  // norm order

  LevelEntry* find(const std::string& hnf) {
    for (auto& e : levels)
      if (e.level_hnf == hnf) return &e;
    return nullptr;
  }
  std::size_t count(LevelStatus s) const {
    std::size_t c = 0;
    for (const auto& e : levels) c += e.status == s;
    return c;
  }
};

inline nlohmann::json to_json(const RunLedger& L) {
  nlohmann::json j;
  j["format"] = "vkt-ledger 1";
  j["group"] = L.group;
  j["field"] = L.field;
  j["n"] = L.n;
  j["degrees"] = L.degrees;
  j["catalog_hash"] = L.catalog_hash;
  j["fan_hash"] = L.fan_hash;
  j["levels"] = nlohmann::json::array();
  for (const auto& e : L.levels) {
    j["levels"].push_back({{"level_hnf", e.level_hnf},
                           {"level_norm", e.level_norm},
                           {"status", to_string(e.status)},
                           {"job_hash", e.job_hash},
                           {"seconds", e.seconds},
                           {"peak_kb", e.peak_kb},
                           {"budget_sec", e.budget_sec},
                           {"budget_mem", e.budget_mem},
                           {"message", e.message},
                           {"rows", e.rows}});
  }
  return j;
}

inline RunLedger ledger_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "vkt-ledger 1") throw ConfigError("unsupported ledger format");
    RunLedger L;
    L.group = j.at("group");
    L.field = j.at("field");
    L.n = j.at("n");
    L.degrees = j.at("degrees").get<std::vector<int>>();
    L.catalog_hash = j.at("catalog_hash");
    L.fan_hash = j.at("fan_hash");
    for (const auto& x : j.at("levels")) {
      LevelEntry e;
      e.level_hnf = x.at("level_hnf");
      e.level_norm = x.at("level_norm");
      e.status = parse_status(x.at("status"));
      e.job_hash = x.at("job_hash");
      e.seconds = x.at("seconds");
      e.peak_kb = x.at("peak_kb");
      e.budget_sec = x.at("budget_sec");
      e.budget_mem = x.at("budget_mem");
      e.message = x.at("message");
      e.rows = x.at("rows").get<std::vector<std::string>>();
      L.levels.push_back(std::move(e));
    }
    return L;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed ledger: ") + e.what());
  }
}

/// Writes `text` to `path` through a temporary file and a rename.
inline void write_atomically(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + tmp);
    os << text;
    os.flush();
    if (!os) throw ConfigError("write to " + tmp + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline void save_ledger(const std::filesystem::path& path, const RunLedger& L) {
  write_atomically(path, to_json(L).dump(1) + "\n");
}

inline std::optional<RunLedger> load_ledger(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  try {
    return ledger_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed ledger " + path.string() + ": " + e.what());
  }
}

}  // namespace vk::pipeline
