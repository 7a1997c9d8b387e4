#pragma once

// Supported fields. The same records ship as data/fields.txt; the embedded
// copy keeps the library usable without the data directory.

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/core/error.hpp"
#include "vk/core/hash.hpp"

namespace vk::algebra {

inline constexpr const char* kBuiltinCatalog = R"CATALOG(# Field catalog. One record per line, fields separated by '|':
# label | aliases | polynomial coefficients (constant first) | r | s | discriminant |
# integral basis (rows in power-basis coordinates, ';'-separated, or "power") |
# fundamental units (integral-basis coordinates, ';'-separated, or "-") |
# roots of unity | class number | zeta model
1.1.1.1   | Q,QQ                      | 0 1          | 1 | 0 | 1   | power | -         | 2  | 1 | riemann
2.0.4.1   | Q(i),Qi,Q(sqrt-1)         | 1 0 1        | 0 | 1 | -4  | power | -         | 4  | 1 | kronecker:-4
2.0.8.1   | Q(sqrt-2)                 | 2 0 1        | 0 | 1 | -8  | power | -         | 2  | 1 | kronecker:-8
2.0.3.1   | Q(sqrt-3),Q(zeta3)        | 1 -1 1       | 0 | 1 | -3  | power | -         | 6  | 1 | kronecker:-3
2.0.20.1  | Q(sqrt-5)                 | 5 0 1        | 0 | 1 | -20 | power | -         | 2  | 2 | kronecker:-20
2.0.24.1  | Q(sqrt-6)                 | 6 0 1        | 0 | 1 | -24 | power | -         | 2  | 2 | kronecker:-24
2.0.7.1   | Q(sqrt-7)                 | 2 -1 1       | 0 | 1 | -7  | power | -         | 2  | 1 | kronecker:-7
2.0.40.1  | Q(sqrt-10)                | 10 0 1       | 0 | 1 | -40 | power | -         | 2  | 2 | kronecker:-40
2.0.11.1  | Q(sqrt-11)                | 3 -1 1       | 0 | 1 | -11 | power | -         | 2  | 1 | kronecker:-11
2.0.52.1  | Q(sqrt-13)                | 13 0 1       | 0 | 1 | -52 | power | -         | 2  | 2 | kronecker:-52
2.0.56.1  | Q(sqrt-14)                | 14 0 1       | 0 | 1 | -56 | power | -         | 2  | 4 | kronecker:-56
2.0.15.1  | Q(sqrt-15)                | 4 -1 1       | 0 | 1 | -15 | power | -         | 2  | 2 | kronecker:-15
3.1.23.1  | cubic-23,F23              | -1 -1 0 1    | 1 | 1 | -23 | power | 0 1 0     | 2  | 1 | thetadiff:23:1,1,6:2,1,3
4.0.125.1 | Q(zeta5),Qzeta5           | 1 1 1 1 1    | 0 | 2 | 125 | power | 0 0 -1 -1 | 10 | 1 | cyclotomic:5
)CATALOG";

namespace detail {

inline std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(strip(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline std::vector<Int> parse_ints(const std::string& s, const std::string& context) {
  std::vector<Int> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    Int v;
    if (v.set_str(tok, 10) != 0) throw ConfigError("bad integer '" + tok + "' in " + context);
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Parses one catalog record line.
inline FieldRecord parse_field_record(const std::string& line) {
  using detail::split;
  using detail::strip;
  auto f = split(line, '|');
  if (f.size() != 11) throw ConfigError("catalog record needs 11 fields: " + line);
  FieldRecord rec;
  rec.label = f[0];
  for (auto& a : split(f[1], ','))
    if (!a.empty()) rec.aliases.push_back(a);
  rec.poly = detail::parse_ints(f[2], rec.label + " polynomial");
  rec.r = std::stoi(f[3]);
  rec.s = std::stoi(f[4]);
  if (rec.discriminant.set_str(f[5], 10) != 0) throw ConfigError("bad discriminant for " + rec.label);
  const int d = static_cast<int>(rec.poly.size()) - 1;
  if (f[6] != "power") {
    for (auto& row : split(f[6], ';')) {
      std::vector<Rat> coords;
      std::istringstream is(row);
      std::string tok;
      while (is >> tok) {
        Rat q;
        if (q.set_str(tok, 10) != 0) throw ConfigError("bad basis entry '" + tok + "' for " + rec.label);
        q.canonicalize();
        coords.push_back(q);
      }
      if (static_cast<int>(coords.size()) != d) throw ConfigError("basis row length mismatch for " + rec.label);
      rec.integral_basis.push_back(coords);
    }
  }
  if (f[7] != "-")
    for (auto& row : split(f[7], ';')) rec.units.push_back(detail::parse_ints(row, rec.label + " unit"));
  rec.torsion_order = static_cast<unsigned>(std::stoul(f[8]));
  rec.class_number = static_cast<unsigned>(std::stoul(f[9]));
  rec.zeta_model = f[10];
  return rec;
}

class Catalog {
 public:
  static Catalog parse(std::istream& is) {
    Catalog c;
    std::string line;
    while (std::getline(is, line)) {
      std::string t = detail::strip(line);
      if (t.empty() || t[0] == '#') continue;
      FieldRecord rec = parse_field_record(t);
      if (c.lines_.count(rec.label)) throw ConfigError("duplicate catalog label " + rec.label);
      c.lines_[rec.label] = t;
      c.order_.push_back(rec.label);
      for (const auto& a : rec.aliases) c.alias_[a] = rec.label;
      c.alias_[rec.label] = rec.label;
      c.records_[rec.label] = std::move(rec);
    }
    return c;
  }

  static Catalog from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field catalog " + path);
    return parse(in);
  }

  static const Catalog& builtin() {
    static const Catalog c = [] {
      std::istringstream is(kBuiltinCatalog);
      return parse(is);
    }();
    return c;
  }

  const std::vector<std::string>& labels() const { return order_; }

  /// Canonical label for a label or alias.
  std::string resolve(const std::string& name) const {
    auto it = alias_.find(name);
    if (it == alias_.end()) throw InvalidInput("unknown field '" + name + "'");
    return it->second;
  }

  const FieldRecord& record(const std::string& name) const { return records_.at(resolve(name)); }

  /// Hash of the catalog line; guards caches against catalog edits.
  std::uint64_t record_hash(const std::string& name) const { return fnv1a64(lines_.at(resolve(name))); }

  /// Constructed and validated field, built once per label.
  std::shared_ptr<const NumberField> field(const std::string& name) const {
    const std::string label = resolve(name);
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = built_->find(label);
    if (it != built_->end()) return it->second;
    auto f = std::make_shared<const NumberField>(records_.at(label));
    (*built_)[label] = f;
    return f;
  }

 private:
  std::map<std::string, FieldRecord> records_;
  std::map<std::string, std::string> lines_;
  std::map<std::string, std::string> alias_;
  std::vector<std::string> order_;
  std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
  std::shared_ptr<std::map<std::string, std::shared_ptr<const NumberField>>> built_ =
      std::make_shared<std::map<std::string, std::shared_ptr<const NumberField>>>();
};

}  // namespace vk::algebra
