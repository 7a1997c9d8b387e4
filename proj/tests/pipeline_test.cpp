#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles/dense.hpp"
#include "test_util.hpp"
#include "vk/algebra/catalog.hpp"
#include "vk/complex/complex.hpp"
#include "vk/pipeline/constants_cmd.hpp"
#include "vk/pipeline/plotdata.hpp"
#include "vk/pipeline/run.hpp"

using namespace vk;
using namespace vk::pipeline;
using vk::algebra::Catalog;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("vkt_test_" + std::to_string(getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

JobSpec spec_for(const std::string& field, int n, long max_norm, const fs::path& out) {
  JobSpec s;
  s.field = field;
  s.n = n;
  s.max_norm = max_norm;
  s.out_dir = out.string();
  return s;
}

std::vector<analytics::TorsionReport> reports_in(const fs::path& csv) {
  std::ifstream is(csv);
  return analytics::read_reports(is, Catalog::builtin());
}

// Compares every row with the dense oracle on a freshly assembled complex.
void expect_rows_match_oracle(const std::string& field, int n, const std::vector<analytics::TorsionReport>& rows) {
  auto F = Catalog::builtin().field(field);
  voronoi::FormSpace V(F, n);
  const auto fan = voronoi::cell_complex(V);
  for (const auto& r : rows) {
    complex::CosetSpace X(F, n, r.level);
    const auto c = complex::assemble_complex(V, fan, X);
    ASSERT_EQ(r.index, Int(static_cast<unsigned long>(c.index)));
    const auto ref = oracle::homology(testutil::to_dense(c.boundary(r.degree)),
                                      testutil::to_dense(c.boundary(r.degree + 1)), c.rank(r.degree));
    EXPECT_EQ(r.betti, ref.betti) << r.level_hnf << " degree " << r.degree;
    Int order = 1;
    for (const auto& t : ref.torsion) order *= t;
    EXPECT_EQ(r.torsion_order(), order) << r.level_hnf << " degree " << r.degree;
  }
}

std::string synthetic_csv(const std::vector<analytics::TorsionReport>& rs) {
  std::ostringstream os;
  analytics::write_report_header(os);
  for (const auto& r : rs) analytics::write_report_row(os, r);
  return os.str();
}

analytics::TorsionReport synthetic(const std::string& field, int n, long level, int degree,
                                   std::map<long, unsigned> primes, long index) {
  auto F = Catalog::builtin().field(field);
  exactla::Factorization f;
  for (auto [p, e] : primes) f.primes[Int(p)] = e;
  return analytics::classify_primes(analytics::describe_group(*F, n), algebra::OIdeal::rational(*F, level), f,
                                    Int(index), degree, 0);
}

std::vector<std::vector<std::string>> plot_rows(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line) && line != "x,y,is_prime,tower") {
  }
  std::vector<std::vector<std::string>> out;
  while (std::getline(is, line)) out.push_back(analytics::csv_detail::split_line(line));
  return out;
}

std::string header_value(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return "";
}

}  // namespace

TEST(Run, RationalPlaneMatchesDenseOracle) {
  const auto out = scratch("q2");
  std::ostringstream log;
  const auto L = cmd_run(spec_for("Q", 2, 20, out), Catalog::builtin(), log);
  ASSERT_EQ(L.levels.size(), 20u);
  EXPECT_EQ(L.count(LevelStatus::done), 20u);
  const auto rows = reports_in(run_paths(out.string(), "1.1.1.1", 2).csv);
  ASSERT_EQ(rows.size(), 60u);  // degrees 0, 1, 2
  expect_rows_match_oracle("Q", 2, rows);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i - 1].level_norm, rows[i].level_norm);
  fs::remove_all(out);
}

TEST(Run, GaussianLevelsMatchDenseOracle) {
  const auto out = scratch("qi");
  auto spec = spec_for("Q(i)", 2, 25, out);
  spec.degrees = {1, 2};
  std::ostringstream log;
  const auto L = cmd_run(spec, Catalog::builtin(), log);
  EXPECT_EQ(L.count(LevelStatus::done), L.levels.size());
  const auto rows = reports_in(run_paths(out.string(), "2.0.4.1", 2).csv);
  EXPECT_EQ(rows.size(), 2 * L.levels.size());
  expect_rows_match_oracle("Q(i)", 2, rows);
  fs::remove_all(out);
}

TEST(Run, EmptyRangeGivesEmptyLedger) {
  const auto out = scratch("empty");
  auto spec = spec_for("Q", 3, 4, out);
  spec.min_norm = 5;
  std::ostringstream log;
  const auto L = cmd_run(spec, Catalog::builtin(), log);
  EXPECT_TRUE(L.levels.empty());
  EXPECT_EQ(reports_in(run_paths(out.string(), "1.1.1.1", 3).csv).size(), 0u);
  fs::remove_all(out);
}

TEST(Run, OneByteMemoryBudgetSkipsEveryLevel) {
  const auto out = scratch("onebyte");
  auto spec = spec_for("Q", 3, 12, out);
  spec.budget_mem = 1;
  std::ostringstream log;
  const auto L = cmd_run(spec, Catalog::builtin(), log);
  ASSERT_EQ(L.levels.size(), 12u);
  EXPECT_EQ(L.count(LevelStatus::skipped_budget), 12u);
  EXPECT_EQ(reports_in(run_paths(out.string(), "1.1.1.1", 3).csv).size(), 0u);
  fs::remove_all(out);
}

TEST(Run, ChildMemoryLimitIsEnforced) {
  const auto out = scratch("memlimit");
  auto spec = spec_for("Q", 3, 0, out);
  spec.explicit_levels = {"53", "211"};
  spec.degrees = {2, 3};
  spec.budget_mem = 40ull << 20;
  std::ostringstream log;
  const auto L = cmd_run(spec, Catalog::builtin(), log);
  ASSERT_EQ(L.levels.size(), 2u);
  EXPECT_EQ(L.levels[0].status, LevelStatus::done);
  EXPECT_EQ(L.levels[1].status, LevelStatus::skipped_budget);
  fs::remove_all(out);
}

TEST(Run, WallClockBudgetIsEnforced) {
  const auto out = scratch("time");
  auto spec = spec_for("Q", 3, 0, out);
  spec.explicit_levels = {"211"};
  spec.degrees = {3};
  spec.budget_sec = 1e-3;
  std::ostringstream log;
  const auto L = cmd_run(spec, Catalog::builtin(), log);
  ASSERT_EQ(L.levels.size(), 1u);
  EXPECT_EQ(L.levels[0].status, LevelStatus::skipped_budget);
  fs::remove_all(out);
}

TEST(Run, RerunIsIdempotent) {
  const auto out = scratch("idem");
  std::ostringstream log;
  auto spec = spec_for("Q", 3, 10, out);
  spec.degrees = {2, 3};
  const auto first = cmd_run(spec, Catalog::builtin(), log);
  const auto paths = run_paths(out.string(), "1.1.1.1", 3);
  const std::string csv = slurp(paths.csv), ledger = slurp(paths.ledger);
  std::ostringstream log2;
  const auto second = cmd_run(spec, Catalog::builtin(), log2);
  EXPECT_EQ(slurp(paths.csv), csv);
  // Timings are those of the first run: nothing was recomputed.
  EXPECT_EQ(slurp(paths.ledger), ledger);
  EXPECT_EQ(log2.str().find("level "), std::string::npos);
  fs::remove_all(out);
}

TEST(Run, ResumedRunMatchesUninterruptedRun) {
  const auto a = scratch("resume_a"), b = scratch("resume_b");
  std::ostringstream log;
  auto spec_a = spec_for("Q", 2, 30, a), spec_b = spec_for("Q", 2, 30, b);
  cmd_run(spec_a, Catalog::builtin(), log);
  // b: a run, then an interruption that left every third level pending.
  cmd_run(spec_b, Catalog::builtin(), log);
  const auto pb = run_paths(b.string(), "1.1.1.1", 2);
  auto L = *load_ledger(pb.ledger);
  for (std::size_t i = 0; i < L.levels.size(); i += 3) {
    L.levels[i].status = LevelStatus::pending;
    L.levels[i].rows.clear();
  }
  save_ledger(pb.ledger, L);
  write_atomically(pb.csv, ledger_csv(L));
  cmd_run(spec_b, Catalog::builtin(), log);
  EXPECT_EQ(slurp(pb.csv), slurp(run_paths(a.string(), "1.1.1.1", 2).csv));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, ExtendingTheRangeKeepsEarlierLevels) {
  const auto a = scratch("extend_a"), b = scratch("extend_b");
  std::ostringstream log;
  cmd_run(spec_for("Q", 2, 25, a), Catalog::builtin(), log);
  cmd_run(spec_for("Q", 2, 10, b), Catalog::builtin(), log);
  auto spec = spec_for("Q", 2, 25, b);
  spec.min_norm = 11;
  cmd_run(spec, Catalog::builtin(), log);
  EXPECT_EQ(slurp(run_paths(b.string(), "1.1.1.1", 2).csv), slurp(run_paths(a.string(), "1.1.1.1", 2).csv));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, InProcessAndIsolatedAgree) {
  const auto a = scratch("iso_a"), b = scratch("iso_b");
  std::ostringstream log;
  auto sa = spec_for("Q", 3, 12, a), sb = spec_for("Q", 3, 12, b);
  sb.isolate = false;
  sa.jobs = 2;
  cmd_run(sa, Catalog::builtin(), log);
  cmd_run(sb, Catalog::builtin(), log);
  EXPECT_EQ(slurp(run_paths(a.string(), "1.1.1.1", 3).csv), slurp(run_paths(b.string(), "1.1.1.1", 3).csv));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, CorruptFanCacheIsRebuilt) {
  const auto out = scratch("corrupt"), ref = scratch("corrupt_ref");
  std::ostringstream log;
  auto spec = spec_for("Q", 2, 8, out);
  cmd_run(spec, Catalog::builtin(), log);
  cmd_run(spec_for("Q", 2, 8, ref), Catalog::builtin(), log);
  const fs::path cache = out / "cache" / "fan-1.1.1.1-n2.txt";
  ASSERT_TRUE(fs::exists(cache));
  std::ofstream(cache) << "vkfan 1\nfield garbage\n";
  fs::remove(run_paths(out.string(), "1.1.1.1", 2).ledger);
  std::ostringstream log2;
  cmd_run(spec, Catalog::builtin(), log2);
  EXPECT_NE(log2.str().find("warning: rebuilding fan cache"), std::string::npos);
  EXPECT_EQ(slurp(run_paths(out.string(), "1.1.1.1", 2).csv), slurp(run_paths(ref.string(), "1.1.1.1", 2).csv));
  fs::remove_all(out);
  fs::remove_all(ref);
}

TEST(Run, CacheDirectoryResolution) {
  ::unsetenv(kCacheEnv);
  EXPECT_EQ(resolve_cache_dir("", "/o"), fs::path("/o/cache"));
  ::setenv(kCacheEnv, "/env/cache", 1);
  EXPECT_EQ(resolve_cache_dir("", "/o"), fs::path("/env/cache"));
  EXPECT_EQ(resolve_cache_dir("/flag", "/o"), fs::path("/flag"));
  ::unsetenv(kCacheEnv);
}

TEST(Run, LedgerOfAnotherJobIsRejected) {
  const auto out = scratch("other");
  std::ostringstream log;
  auto spec = spec_for("Q", 2, 5, out);
  cmd_run(spec, Catalog::builtin(), log);
  spec.degrees = {1};
  EXPECT_THROW(cmd_run(spec, Catalog::builtin(), log), ConfigError);
  fs::remove_all(out);
}

TEST(Run, InvalidSpecsAreRejected) {
  const auto& cat = Catalog::builtin();
  auto s = spec_for("Q", 3, 10, "/tmp/unused");
  s.degrees = {6};
  EXPECT_THROW(validated(s, cat), InvalidInput);
  EXPECT_THROW(validated(spec_for("Q(sqrt-5)", 2, 10, "/tmp/unused"), cat), InvalidInput);
  EXPECT_THROW(validated(spec_for("cubic-23", 2, 10, "/tmp/unused"), cat), InvalidInput);
  EXPECT_THROW(validated(spec_for("nowhere", 2, 10, "/tmp/unused"), cat), InvalidInput);
  EXPECT_EQ(validated(spec_for("Q", 3, 10, "/tmp/unused"), cat).degrees, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(parse_degrees("3,2,3"), (std::vector<int>{3, 2, 3}));
  EXPECT_THROW(parse_degrees("2,x"), InvalidInput);
  EXPECT_EQ(parse_bytes("1"), 1u);
  EXPECT_EQ(parse_bytes("3G"), 3ull << 30);
  EXPECT_THROW(parse_bytes("3T"), InvalidInput);
}

TEST(Run, IndexFormulaMatchesCosetCount) {
  for (auto [field, n, hi] : std::vector<std::tuple<std::string, int, long>>{{"Q", 2, 60}, {"Q", 3, 30}, {"Q(i)", 2, 40}}) {
    auto F = Catalog::builtin().field(field);
    for (const auto& L : algebra::ideals_of_norm_between(*F, 1, hi))
      EXPECT_EQ(gamma0_index(L, n), Int(static_cast<unsigned long>(complex::CosetSpace(F, n, L).size())))
          << field << " " << L.hnf_string();
  }
}

TEST(Run, ComputedRowsSatisfyClassificationInvariants) {
  const auto out = scratch("classify");
  auto spec = spec_for("Q", 3, 40, out);
  spec.degrees = {2, 3};
  std::ostringstream log;
  cmd_run(spec, Catalog::builtin(), log);
  // read_reports re-derives every row's tags from its own columns.
  const auto rows = reports_in(run_paths(out.string(), "1.1.1.1", 3).csv);
  ASSERT_EQ(rows.size(), 80u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.tags.size(), r.torsion.primes.size());
    for (const auto& t : r.tags) {
      const bool tp = r.group.is_torsion_prime(t.prime.get_si());
      EXPECT_EQ(t.tag == analytics::PrimeTag::torsion, tp);
      if (t.tag == analytics::PrimeTag::exotic)
        for (const auto& f : algebra::ideal_factor(r.level)) EXPECT_NE((f.prime.norm() - 1) % t.prime, 0);
    }
  }
  fs::remove_all(out);
}

TEST(Constants, CommandOutput) {
  auto run = [](const std::string& g) {
    auto [f, n] = parse_group(g);
    std::ostringstream os;
    cmd_constants(os, *Catalog::builtin().field(f), n);
    return os.str();
  };
  const auto gl3 = run("GL3/Q");
  EXPECT_NEAR(std::stod(header_value(gl3, "bv_limit")), 0.000732476036628005, 1e-15);
  const auto bianchi = run("GL2/Q(i)");
  EXPECT_EQ(header_value(bianchi, "deficiency"), "1");
  EXPECT_EQ(header_value(bianchi, "d"), "3");
  EXPECT_EQ(header_value(bianchi, "torsion_primes"), "2,3");
  const auto gl5 = run("GL5(Z)");
  EXPECT_EQ(header_value(gl5, "deficiency"), "2");
  EXPECT_EQ(header_value(gl5, "bv_limit"), "");
  EXPECT_NE(header_value(gl5, "note").find("conjecturally zero"), std::string::npos);
  EXPECT_THROW(parse_group("SL3/Q"), InvalidInput);
}

TEST(PlotData, ConstantRatioAndReference) {
  std::vector<analytics::TorsionReport> rs;
  for (long j : {4, 1, 3, 2}) rs.push_back(synthetic("Q", 3, 10 + j, 2, {{2, unsigned(j)}}, 7 * j));
  std::istringstream csv(synthetic_csv(rs));
  std::ostringstream out;
  cmd_plotdata(csv, out, {2, analytics::Ordering::by_index, "all", "ratio"}, Catalog::builtin());
  const auto rows = plot_rows(out.str());
  ASSERT_EQ(rows.size(), 4u);
  double last = 0;
  for (const auto& r : rows) {
    EXPECT_NEAR(std::stod(r[1]), std::log(2.0) / 7, 1e-15);
    EXPECT_GT(std::stod(r[0]), last);
    last = std::stod(r[0]);
  }
  std::ostringstream c;
  cmd_constants(c, *Catalog::builtin().field("Q"), 3);
  EXPECT_NEAR(std::stod(header_value(out.str(), "reference")), std::stod(header_value(c.str(), "bv_limit")), 1e-18);
  EXPECT_EQ(header_value(out.str(), "mode"), "ratio");
}

TEST(PlotData, PrimeAndTowerFilters) {
  std::vector<analytics::TorsionReport> rs;
  for (long N : {2, 3, 4, 6, 7, 8, 9}) rs.push_back(synthetic("Q", 3, N, 2, {{5, 1}}, 10 * N));
  std::istringstream csv(synthetic_csv(rs));
  std::ostringstream out;
  cmd_plotdata(csv, out, {2, analytics::Ordering::by_level_norm, "prime", "ratio"}, Catalog::builtin());
  const auto rows = plot_rows(out.str());
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r[2], "1");
  std::istringstream csv2(synthetic_csv(rs));
  std::ostringstream tower;
  cmd_plotdata(csv2, tower, {2, analytics::Ordering::by_level_norm, "tower:2", "ratio"}, Catalog::builtin());
  const auto trows = plot_rows(tower.str());
  ASSERT_EQ(trows.size(), 3u);
  EXPECT_EQ(trows[0][0], "2");
  EXPECT_EQ(trows[1][0], "4");
  EXPECT_EQ(trows[2][0], "8");
  for (const auto& r : trows) EXPECT_EQ(r[3], "0");
}

TEST(PlotData, EulerModeCancelsMirroredDegrees) {
  std::vector<analytics::TorsionReport> rs;
  for (long N : {5, 7, 11}) {
    rs.push_back(synthetic("Q", 3, N, 2, {{13, 2}}, 30 * N));
    rs.push_back(synthetic("Q", 3, N, 3, {{13, 2}}, 30 * N));
  }
  std::istringstream csv(synthetic_csv(rs));
  std::ostringstream out;
  cmd_plotdata(csv, out, {std::nullopt, analytics::Ordering::by_index, "all", "euler"}, Catalog::builtin());
  const auto rows = plot_rows(out.str());
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(std::stod(r[1]), 0.0);
  EXPECT_EQ(header_value(out.str(), "degree"), "2");
}

TEST(PlotData, SchemaMismatchIsDiagnosed) {
  std::istringstream csv("field_label,n,level_norm,level_hnf,index,voronoi_degree,betti,torsion,log_ratio\n");
  std::ostringstream out;
  try {
    cmd_plotdata(csv, out, {2, analytics::Ordering::by_index, "all", "ratio"}, Catalog::builtin());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("column 8 is 'torsion', expected 'torsion_factored'"), std::string::npos);
  }
}

TEST(PlotData, EmptyInputAndDeterminism) {
  std::istringstream empty(synthetic_csv({}));
  std::ostringstream out;
  cmd_plotdata(empty, out, {2, analytics::Ordering::by_index, "all", "ratio"}, Catalog::builtin());
  EXPECT_TRUE(plot_rows(out.str()).empty());
  std::vector<analytics::TorsionReport> rs{synthetic("Q", 5, 3, 6, {{7, 1}}, 121)};
  std::string a, b;
  for (auto* s : {&a, &b}) {
    std::istringstream csv(synthetic_csv(rs));
    std::ostringstream os;
    cmd_plotdata(csv, os, {6, analytics::Ordering::by_index, "all", "ratio"}, Catalog::builtin());
    *s = os.str();
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(header_value(a, "conjecturally_zero"), "1");
  EXPECT_EQ(header_value(a, "reference"), "0");
}
