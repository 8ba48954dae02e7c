// Command-line front end: run one scenario, compare allocators across seeds,
// or sweep a scenario parameter.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ranslice/errors.h"
#include "ranslice/harness.h"

namespace fs = std::filesystem;
using namespace ranslice;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Common {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Scenario config (JSON)");
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", c.out, "Output directory (default $RANSLICE_OUT_DIR or ./out)");
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.config_path.empty() ? ScenarioConfig{} : harness::load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

fs::path out_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("RANSLICE_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "out";
}

std::vector<AllocatorKind> parse_allocators(const std::vector<std::string>& names) {
  std::vector<AllocatorKind> out;
  for (const auto& n : names) out.push_back(parse_allocator(n));
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void print_comparison(const harness::Comparison& cmp) {
  std::cout << harness::comparison_csv(cmp);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAN slicing allocation simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::optional<std::string> run_allocator;
  bool run_check = false;
  auto* run = app.add_subcommand("run", "Run one scenario and write metrics.csv / summary.json");
  add_common(run, run_opts);
  run->add_option("--allocator", run_allocator, "qlearning | myopic | fcfs | random");
  run->add_flag("--check", run_check, "Verify conservation invariants every slot");

  Common cmp_opts;
  std::vector<std::string> cmp_allocators{"qlearning", "myopic", "fcfs", "random"};
  int cmp_seeds = 10;
  auto* compare = app.add_subcommand("compare", "Compare allocators over several seeds");
  add_common(compare, cmp_opts);
  compare->add_option("--allocator", cmp_allocators, "Allocators to compare")->delimiter(',');
  compare->add_option("--seeds", cmp_seeds, "Number of seeds")->check(CLI::PositiveNumber);

  Common sw_opts;
  std::string sw_param;
  std::vector<std::string> sw_values;
  std::vector<std::string> sw_allocators{"qlearning"};
  int sw_seeds = 10;
  auto* sweep = app.add_subcommand("sweep", "Sweep n_ues, p_i or fixed_weights");
  add_common(sweep, sw_opts);
  sweep->add_option("--param", sw_param, "n_ues | p_i | fixed_weights")->required();
  sweep->add_option("--values", sw_values,
                    "Comma-separated values; weight lists use ';' (e.g. \"5;3;1,1;3;5\")")
      ->required()
      ->delimiter(',');
  sweep->add_option("--allocator", sw_allocators, "Allocators to run")->delimiter(',');
  sweep->add_option("--seeds", sw_seeds, "Number of seeds")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ScenarioConfig cfg = load(run_opts);
      if (run_allocator) cfg.allocator = parse_allocator(*run_allocator);
      const auto result = harness::run_scenario(cfg, {run_check});
      const auto files = harness::write_outputs(result, out_dir(run_opts));
      std::cout << "allocator=" << result.summary.allocator << " seed=" << result.summary.seed
                << " utility=" << result.summary.total_utility
                << " granted=" << result.summary.granted << " expired=" << result.summary.expired
                << "\n";
      for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    } else if (*compare) {
      const ScenarioConfig cfg = load(cmp_opts);
      const auto cmp = harness::compare_allocators(cfg, parse_allocators(cmp_allocators), cmp_seeds);
      const auto dir = out_dir(cmp_opts);
      ensure_dir(dir);
      harness::write_file(dir / "comparison.csv", harness::comparison_csv(cmp));
      print_comparison(cmp);
    } else if (*sweep) {
      const ScenarioConfig cfg = load(sw_opts);
      const auto rows = harness::run_sweep(cfg, harness::parse_sweep_param(sw_param), sw_values,
                                           parse_allocators(sw_allocators), sw_seeds);
      const auto dir = out_dir(sw_opts);
      ensure_dir(dir);
      const auto csv = harness::sweep_csv(rows);
      harness::write_file(dir / "sweep.csv", csv);
      std::cout << csv;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
