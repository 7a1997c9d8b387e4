#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "vk/algebra/catalog.hpp"
#include "vk/pipeline/constants_cmd.hpp"
#include "vk/pipeline/plotdata.hpp"
#include "vk/pipeline/run.hpp"

using namespace vk;

int main(int argc, char** argv) {
  CLI::App app{"Torsion in the Voronoi-Koecher homology of congruence subgroups of GL_n"};
  app.require_subcommand(1);

  std::string group;
  int digits = 20;
  auto* constants = app.add_subcommand("constants", "Print the invariants and limit constant of a group");
  constants->add_option("group", group, "GL<n>/<field>, e.g. GL3/Q or GL2/Q(i)")->required();
  constants->add_option("--digits", digits, "Digits of the limit constant")->check(CLI::Range(1, 30));

  pipeline::JobSpec spec;
  std::string min_norm = "1", max_norm = "0", degrees = "all", budget_mem = "0";
  auto* run = app.add_subcommand("run", "Compute homology over a range of levels");
  run->add_option("--group", spec.field, "Field label or alias")->required();
  run->add_option("--n", spec.n, "Rank n of GL_n")->required();
  run->add_option("--min-norm", min_norm, "Smallest level norm")->capture_default_str();
  run->add_option("--max-norm", max_norm, "Largest level norm");
  run->add_option("--level", spec.explicit_levels, "Explicit level as an HNF string (repeatable)");
  run->add_option("--degrees", degrees, "Voronoi degrees, comma separated, or 'all'")->capture_default_str();
  run->add_option("--budget-sec", spec.budget_sec, "Wall-clock seconds per level (0 = unlimited)");
  run->add_option("--budget-mem", budget_mem, "Memory per level in bytes, K/M/G suffix allowed (0 = unlimited)");
  run->add_option("--out", spec.out_dir, "Output directory")->required();
  run->add_option("--cache", spec.cache_dir, std::string("Fan cache directory (default $") + pipeline::kCacheEnv +
                                                 ", then <out>/cache)");
  run->add_option("--jobs", spec.jobs, "Levels computed concurrently")->capture_default_str();
  run->add_flag("--in-process", "Compute in this process (no memory limit enforcement)");

  std::string csv_path, out_path, order = "index", filter = "all", mode = "ratio";
  std::optional<int> degree;
  auto* plot = app.add_subcommand("plotdata", "Turn a report CSV into a plot-data file");
  plot->add_option("--csv", csv_path, "Report CSV")->required();
  plot->add_option("--degree", degree, "Voronoi degree (euler mode: sign origin)");
  plot->add_option("--order", order, "index or norm")->capture_default_str();
  plot->add_option("--filter", filter, "all, prime or tower:<seed HNF>")->capture_default_str();
  plot->add_option("--mode", mode, "ratio or euler")->capture_default_str();
  plot->add_option("--out", out_path, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);
  const auto& catalog = algebra::Catalog::builtin();
  try {
    if (*constants) {
      auto [field, n] = pipeline::parse_group(group);
      pipeline::cmd_constants(std::cout, *catalog.field(field), n, digits);
    } else if (*run) {
      spec.min_norm = Int(min_norm);
      spec.max_norm = Int(max_norm);
      spec.degrees = pipeline::parse_degrees(degrees);
      spec.budget_mem = pipeline::parse_bytes(budget_mem);
      spec.isolate = run->count("--in-process") == 0;
      const auto L = pipeline::cmd_run(spec, catalog, std::cerr);
      std::cout << "levels=" << L.levels.size() << " done=" << L.count(pipeline::LevelStatus::done)
                << " skipped-budget=" << L.count(pipeline::LevelStatus::skipped_budget)
                << " failed=" << L.count(pipeline::LevelStatus::failed)
                << " pending=" << L.count(pipeline::LevelStatus::pending) << "\n";
    } else if (*plot) {
      std::ifstream in(csv_path);
      if (!in) throw ConfigError("cannot read " + csv_path);
      pipeline::PlotSpec ps{degree, pipeline::parse_ordering(order), filter, mode};
      if (out_path.empty()) {
        pipeline::cmd_plotdata(in, std::cout, ps, catalog);
      } else {
        std::ostringstream os;
        pipeline::cmd_plotdata(in, os, ps, catalog);
        pipeline::write_atomically(out_path, os.str());
      }
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
