#pragma once

// Plot-data file: key=value header lines, then a CSV block.
//
//   vkt-plotdata 1
//   group=GL3/1.1.1.1
//   degree=2
//   mode=ratio                 (ratio | euler)
//   ordering=index             (index | norm)
//   filter=all
//   reference=0.000732...      (omitted when there is none)
//   conjecturally_zero=0
//   note=...                   (zero or more)
//   x,y,is_prime,tower
//   57,0.0123,1,-
//
// Rows are sorted by x; tower is a tower id or "-".

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vk/algebra/catalog.hpp"
#include "vk/analytics/constants.hpp"
#include "vk/analytics/report_csv.hpp"
#include "vk/analytics/reports.hpp"
#include "vk/core/error.hpp"

namespace vk::pipeline {

struct PlotSpec {
  std::optional<int> degree;  // ratio: required; euler: sign origin, defaults to the cuspidal top
  analytics::Ordering ordering = analytics::Ordering::by_index;
  std::string filter = "all";  // all | prime | tower:<seed HNF>
  std::string mode = "ratio";
};

inline analytics::Ordering parse_ordering(const std::string& s) {
  if (s == "index") return analytics::Ordering::by_index;
  if (s == "norm") return analytics::Ordering::by_level_norm;
  throw InvalidInput("ordering must be index or norm, not '" + s + "'");
}

inline analytics::SeriesFilter parse_filter(const std::string& s, const algebra::NumberField& F) {
  using Kind = analytics::SeriesFilter::Kind;
  if (s == "all") return {Kind::all, std::nullopt};
  if (s == "prime") return {Kind::prime, std::nullopt};
  if (s.rfind("tower:", 0) == 0) return {Kind::tower, algebra::OIdeal::parse_hnf(F, s.substr(6))};
  throw InvalidInput("filter must be all, prime or tower:<seed>, not '" + s + "'");
}

/// The limit constant for a group, or nothing when delta != 1 or no closed form is known.
inline std::optional<double> reference_for(const algebra::NumberField& F, int n) {
  if (analytics::deficiency(F, n) != 1) return std::nullopt;
  try {
    return static_cast<double>(analytics::bv_limit(F, n).value);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
}

inline analytics::Series build_plot_series(const std::vector<analytics::TorsionReport>& reports, const PlotSpec& spec,
                                           const algebra::Catalog& catalog) {
  using namespace analytics;
  if (spec.mode != "ratio" && spec.mode != "euler") throw InvalidInput("mode must be ratio or euler, not '" + spec.mode + "'");
  if (spec.mode == "ratio" && !spec.degree) throw InvalidInput("ratio mode needs --degree");
  Series s;
  s.mode = spec.mode;
  s.ordering = spec.ordering;
  if (reports.empty()) {
    s.degree = spec.degree.value_or(0);
    s.flags.push_back("no rows");
    return s;
  }
  auto F = catalog.field(reports.front().group.field);
  const int n = reports.front().group.n;
  const auto filtered = filter_series(reports, parse_filter(spec.filter, *F));
  const auto bv = reference_for(*F, n);
  if (spec.mode == "ratio") {
    s = ratio_series(filtered, *spec.degree, spec.ordering, bv);
  } else {
    s = euler_characteristic_series(filtered, spec.degree.value_or(euler_sign_origin(reports.front().group)),
                                    spec.ordering, bv);
  }
  s.group = reports.front().group.name();
  if (spec.filter.rfind("tower:", 0) == 0)
    for (auto& p : s.points) p.tower = 0;
  if (s.conjecturally_zero) s.flags.insert(s.flags.begin(), "delta != 1: the limit is conjecturally zero");
  return s;
}

inline void write_plotdata(std::ostream& os, const analytics::Series& s, const std::string& filter) {
  using analytics::format_double;
  os << "vkt-plotdata 1\n";
  os << "group=" << s.group << "\n";
  os << "degree=" << s.degree << "\n";
  os << "mode=" << s.mode << "\n";
  os << "ordering=" << (s.ordering == analytics::Ordering::by_index ? "index" : "norm") << "\n";
  os << "filter=" << filter << "\n";
  if (s.reference) os << "reference=" << format_double(*s.reference) << "\n";
  os << "conjecturally_zero=" << (s.conjecturally_zero ? 1 : 0) << "\n";
  for (const auto& f : s.flags) os << "note=" << f << "\n";
  os << "x,y,is_prime,tower\n";
  for (const auto& p : s.points)
    os << format_double(p.x) << ',' << format_double(p.y) << ',' << (p.is_prime ? 1 : 0) << ','
       << (p.tower < 0 ? std::string("-") : std::to_string(p.tower)) << "\n";
}

inline void cmd_plotdata(std::istream& csv, std::ostream& out, const PlotSpec& spec, const algebra::Catalog& catalog) {
  const auto reports = analytics::read_reports(csv, catalog);
  write_plotdata(out, build_plot_series(reports, spec, catalog), spec.filter);
}

}  // namespace vk::pipeline
