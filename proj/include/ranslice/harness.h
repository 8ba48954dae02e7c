#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ranslice/config.h"

namespace ranslice::harness {

// ---------------------------------------------------------------------------
// Configuration

/// Parses a JSON config tree on top of the defaults. Unknown keys and bad
/// values raise ConfigError naming the field path.
ScenarioConfig config_from_json(const nlohmann::json& j);
/// As above; a `ber_curve` file path is resolved against base_dir.
ScenarioConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Running

struct MetricsRecord {
  int64_t slot = 0;
  int granted = 0;
  int expired = 0;
  int64_t cum_utility = 0;
  int free_blocks = 0;
  int free_cpu = 0;
  int free_power = 0;
  int incumbent_blocks = 0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct SummaryReport {
  int64_t total_utility = 0;
  std::vector<int64_t> per_ue_served;
  int64_t arrived = 0;
  int64_t granted = 0;
  int64_t expired = 0;
  int64_t queue_remaining = 0;
  uint64_t seed = 0;
  std::string allocator;
  uint64_t arrival_fingerprint = 0;
  uint64_t incumbent_fingerprint = 0;
  nlohmann::json config;
  double wall_time_ms = 0.0;  // not serialized with the summary

  friend bool operator==(const SummaryReport& a, const SummaryReport& b) {
    return a.total_utility == b.total_utility && a.per_ue_served == b.per_ue_served &&
           a.arrived == b.arrived && a.granted == b.granted && a.expired == b.expired &&
           a.queue_remaining == b.queue_remaining && a.seed == b.seed &&
           a.allocator == b.allocator && a.arrival_fingerprint == b.arrival_fingerprint &&
           a.incumbent_fingerprint == b.incumbent_fingerprint && a.config == b.config;
  }
};

struct RunResult {
  std::vector<MetricsRecord> records;
  SummaryReport summary;
};

struct RunOptions {
  // Verify conservation, telescoping and grant-time QoE every slot; throws
  // std::logic_error on the first violation.
  bool check_invariants = false;
};

/// Runs one scenario. Deterministic in (config, config.seed): arrivals,
/// request attributes, incumbent, exploration, Q-init and the random
/// allocator each draw from their own substream of the seed.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Experiments

struct AllocatorStats {
  AllocatorKind allocator = AllocatorKind::kQLearning;
  std::vector<uint64_t> seeds;
  std::vector<int64_t> utilities;  // one per seed
  std::vector<std::vector<int64_t>> per_ue_served;  // one per seed
  double mean = 0.0;
  int64_t min = 0;
  int64_t max = 0;

  /// Mean per-UE served count over seeds.
  std::vector<double> mean_per_ue_served() const;
};

struct Comparison {
  std::vector<AllocatorStats> rows;

  const AllocatorStats& row(AllocatorKind kind) const;
  /// (mean(a) - mean(b)) / mean(b), as a fraction.
  double improvement(AllocatorKind a, AllocatorKind b) const;
};

/// Seeds used by compare/sweep: base, base+1, ...
std::vector<uint64_t> seed_list(uint64_t base, int n_seeds);

/// Runs every allocator on every seed. Runs are independent and execute in
/// parallel; results are keyed by (allocator, seed) so order does not matter.
Comparison compare_allocators(const ScenarioConfig& config,
                              const std::vector<AllocatorKind>& allocators, int n_seeds);

enum class SweepParam { kNUes, kPI, kFixedWeights };
SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam p);

struct SweepRow {
  std::string value;  // rendered parameter value
  IncumbentPattern pattern = IncumbentPattern::kNone;
  Comparison comparison;
};

/// One comparison per value. Values are strings: an integer for n_ues, a
/// real for p_i (run under both the iid and session patterns), and a
/// list such as "5;3;1" for fixed_weights.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, SweepParam param,
                                const std::vector<std::string>& values,
                                const std::vector<AllocatorKind>& allocators, int n_seeds);

// ---------------------------------------------------------------------------
// Output

inline constexpr const char* kMetricsHeader =
    "slot,granted,expired,cum_utility,free_blocks,free_cpu,free_power,incumbent_blocks";

std::string metrics_csv(const std::vector<MetricsRecord>& records);
nlohmann::json summary_to_json(const SummaryReport& report);
SummaryReport summary_from_json(const nlohmann::json& j);
std::string comparison_csv(const Comparison& comparison);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes metrics.csv and summary.json (and timing.json with the wall
/// time) under out_dir, creating it if needed. Throws std::runtime_error
/// naming the path on I/O failure.
std::vector<std::filesystem::path> write_outputs(const RunResult& result,
                                                 const std::filesystem::path& out_dir);

/// Writes `contents` to `path`, throwing std::runtime_error with the path on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ranslice::harness
