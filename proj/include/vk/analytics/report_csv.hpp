#pragma once

// Report CSV, one row per (group, level, degree):
//   field_label,n,level_norm,level_hnf,index,voronoi_degree,betti,
//   torsion_factored,log_ratio,prime_tags,is_prime_level
// torsion_factored is "p^e ..." with residuals as "R:<value>" ("1" when
// trivial); prime_tags is "p:tag ..." ("-" when empty). Fields holding
// commas are double-quoted.

#include <gmpxx.h>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vk/algebra/catalog.hpp"
#include "vk/analytics/reports.hpp"
#include "vk/core/error.hpp"

namespace vk::analytics {

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"field_label", "n",         "level_norm", "level_hnf",
                                             "index",       "voronoi_degree", "betti", "torsion_factored",
                                             "log_ratio",   "prime_tags", "is_prime_level"};
  return cols;
}

namespace csv_detail {

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in CSV line: " + line);
  out.push_back(cur);
  return out;
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

}  // namespace csv_detail

inline std::string format_torsion(const Factorization& f) {
  std::string s;
  for (const auto& [p, e] : f.primes) s += (s.empty() ? "" : " ") + p.get_str() + "^" + std::to_string(e);
  for (const auto& r : f.residuals) s += (s.empty() ? "" : " ") + std::string("R:") + r.get_str();
  return s.empty() ? "1" : s;
}

inline Factorization parse_torsion(const std::string& s) {
  Factorization f;
  if (s == "1") return f;
  for (const auto& w : csv_detail::words(s)) {
    if (w.rfind("R:", 0) == 0) {
      f.residuals.emplace_back(w.substr(2));
      continue;
    }
    auto caret = w.find('^');
    if (caret == std::string::npos) throw ConfigError("torsion factor '" + w + "' is not p^e");
    try {
      f.primes[Int(w.substr(0, caret))] += static_cast<unsigned>(std::stoul(w.substr(caret + 1)));
    } catch (const std::exception&) {
      throw ConfigError("torsion factor '" + w + "' is not p^e");
    }
  }
  return f;
}

inline std::string format_tags(const TorsionReport& r) {
  std::string s;
  for (const auto& t : r.tags) s += (s.empty() ? "" : " ") + t.prime.get_str() + ":" + to_string(t.tag);
  for (const auto& x : r.torsion.residuals) s += (s.empty() ? "" : " ") + x.get_str() + ":" + kResidualTag;
  return s.empty() ? "-" : s;
}

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_report_header(std::ostream& os) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
}

inline void write_report_row(std::ostream& os, const TorsionReport& r) {
  using csv_detail::quote;
  os << quote(r.group.field) << ',' << r.group.n << ',' << r.level_norm << ',' << quote(r.level_hnf) << ','
     << r.index << ',' << r.degree << ',' << r.betti << ',' << format_torsion(r.torsion) << ','
     << format_double(r.log_ratio) << ',' << format_tags(r) << ',' << (r.is_prime_level ? 1 : 0) << "\n";
}

/// One CSV row as text fields keyed by the schema.
struct ReportRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
  const std::string& operator[](const std::string& col) const {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == col) return fields[i];
    throw InternalError("no column " + col);
  }
};

/// Reads rows, checking the header against the schema column by column.
inline std::vector<ReportRow> read_report_rows(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("report CSV is empty");
  const auto header = csv_detail::split_line(line);
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < std::max(header.size(), cols.size()); ++i) {
    const std::string have = i < header.size() ? header[i] : "<missing>";
    const std::string want = i < cols.size() ? cols[i] : "<none>";
    if (have != want)
      throw ConfigError("report CSV column " + std::to_string(i + 1) + " is '" + have + "', expected '" + want + "'");
  }
  std::vector<ReportRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    ReportRow r{csv_detail::split_line(line), lineno};
    if (r.fields.size() != cols.size())
      throw ConfigError("report CSV line " + std::to_string(lineno) + " has " + std::to_string(r.fields.size()) +
                        " fields, expected " + std::to_string(cols.size()));
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Rebuilds a report from its row, re-deriving the classification from
/// the torsion and level columns; throws ConfigError when the stored tags,
/// prime flag or ratio disagree.
inline TorsionReport report_from_row(const ReportRow& row, const algebra::Catalog& catalog) {
  auto fail = [&](const std::string& msg) -> void {
    throw ConfigError("report CSV line " + std::to_string(row.line) + ": " + msg);
  };
  try {
    auto F = catalog.field(row["field_label"]);
    const int n = std::stoi(row["n"]);
    const OIdeal level = OIdeal::parse_hnf(*F, row["level_hnf"]);
    if (level.norm() != Int(row["level_norm"])) fail("level_norm does not match level_hnf");
    auto r = classify_primes(describe_group(*F, n), level, parse_torsion(row["torsion_factored"]),
                             Int(row["index"]), std::stoi(row["voronoi_degree"]),
                             static_cast<std::size_t>(std::stoul(row["betti"])));
    if (format_tags(r) != row["prime_tags"]) fail("prime_tags '" + row["prime_tags"] + "' should be '" + format_tags(r) + "'");
    if (std::to_string(r.is_prime_level ? 1 : 0) != row["is_prime_level"]) fail("is_prime_level is wrong");
    const double stored = std::stod(row["log_ratio"]);
    if (std::abs(stored - r.log_ratio) > 1e-12 * std::max(1.0, std::abs(r.log_ratio))) fail("log_ratio is wrong");
    r.log_ratio = stored;
    return r;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  throw InternalError("unreachable");
}

inline std::vector<TorsionReport> read_reports(std::istream& is, const algebra::Catalog& catalog) {
  std::vector<TorsionReport> out;
  for (const auto& row : read_report_rows(is)) out.push_back(report_from_row(row, catalog));
  return out;
}

}  // namespace vk::analytics
