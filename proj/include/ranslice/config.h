#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ranslice/phy.h"

namespace ranslice {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

enum class AllocatorKind { kQLearning, kMyopic, kFcfs, kRandom };

std::string_view to_string(AllocatorKind kind);
/// Throws ConfigError for an unknown name.
AllocatorKind parse_allocator(std::string_view name);

enum class IncumbentPattern { kNone, kIid, kSession };

std::string_view to_string(IncumbentPattern pattern);
IncumbentPattern parse_incumbent_pattern(std::string_view name);

struct AgentConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon = 0.1;
  // Linear decay of epsilon to this value over the horizon; equal to
  // epsilon means no decay.
  double epsilon_final = 0.1;
  // Cap on the request block count carried in the learning state.
  int kblocks_cap = 3;
  // Slots of learning on an independent arrival stream before the measured
  // horizon starts. Zero learns purely online.
  int warmup_slots = 0;
};

struct IncumbentConfig {
  IncumbentPattern pattern = IncumbentPattern::kNone;
  double p_i = 0.0;
};

struct TopologyConfig {
  int n_gnbs = 1;
  std::vector<std::pair<int, int>> neighbors;
};

/// Full experiment description. Defaults reproduce the single-gNodeB
/// three-UE evaluation setting.
struct ScenarioConfig {
  int n_ues = 3;
  double arrival_rate = 0.5;
  int horizon_slots = 1000;

  int n_blocks = 11;
  int cpu_levels = 50;
  int power_budget = 10;
  int power_levels = 5;
  double per_block_rate_c = phy::kDefaultPerBlockRate;

  IntRange weight_range{1, 5};
  IntRange lifetime_range{1, 10};
  IntRange deadline_range{1, 20};
  IntRange cpu_demand_range{1, 10};
  IntRange rate_blocks_range{1, 3};  // demand_rate = k * per_block_rate_c
  std::vector<int> fixed_weights;    // per-UE override when non-empty
  RealRange max_snr_range{1.5, 3.0};

  phy::BerCurve ber_curve = phy::BerCurve::default_curve();

  AgentConfig agent;
  AllocatorKind allocator = AllocatorKind::kQLearning;
  IncumbentConfig incumbent;
  std::optional<TopologyConfig> topology;

  uint64_t seed = 1;

  phy::PhyContext phy_context() const {
    return phy::PhyContext{ber_curve, power_levels, per_block_rate_c};
  }
};

/// Throws ConfigError with the field path of the first invalid value.
void validate(const ScenarioConfig& config);

}  // namespace ranslice
