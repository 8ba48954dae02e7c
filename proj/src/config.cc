#include "ranslice/config.h"

#include <string>

#include "ranslice/errors.h"

namespace ranslice {

std::string_view to_string(AllocatorKind kind) {
  switch (kind) {
    case AllocatorKind::kQLearning: return "qlearning";
    case AllocatorKind::kMyopic: return "myopic";
    case AllocatorKind::kFcfs: return "fcfs";
    case AllocatorKind::kRandom: return "random";
  }
  return "?";
}

AllocatorKind parse_allocator(std::string_view name) {
  if (name == "qlearning") return AllocatorKind::kQLearning;
  if (name == "myopic") return AllocatorKind::kMyopic;
  if (name == "fcfs") return AllocatorKind::kFcfs;
  if (name == "random") return AllocatorKind::kRandom;
  throw ConfigError("unknown allocator '" + std::string(name) +
                        "' (expected qlearning|myopic|fcfs|random)",
                    "allocator");
}

std::string_view to_string(IncumbentPattern pattern) {
  switch (pattern) {
    case IncumbentPattern::kNone: return "none";
    case IncumbentPattern::kIid: return "iid";
    case IncumbentPattern::kSession: return "session";
  }
  return "?";
}

IncumbentPattern parse_incumbent_pattern(std::string_view name) {
  if (name == "none") return IncumbentPattern::kNone;
  if (name == "iid") return IncumbentPattern::kIid;
  if (name == "session") return IncumbentPattern::kSession;
  throw ConfigError("unknown pattern '" + std::string(name) + "' (expected none|iid|session)",
                    "incumbent.pattern");
}

namespace {

void require(bool ok, const char* path, const char* what) {
  if (!ok) throw ConfigError(what, path);
}

void require_range(const IntRange& r, const char* path, int min_lo) {
  require(r.lo <= r.hi, path, "empty range");
  require(r.lo >= min_lo, path, "lower bound too small");
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require(c.n_ues >= 1, "n_ues", "must be >= 1");
  require(c.arrival_rate >= 0.0 && c.arrival_rate <= 1.0, "arrival_rate", "must be in [0, 1]");
  require(c.horizon_slots >= 0, "horizon_slots", "must be >= 0");
  require(c.n_blocks >= 1 && c.n_blocks <= 4095, "n_blocks", "must be in [1, 4095]");
  require(c.cpu_levels >= 1, "cpu_levels", "must be >= 1");
  require(c.power_budget >= 1, "power_budget", "must be >= 1");
  require(c.power_levels >= 1, "power_levels", "must be >= 1");
  require(c.per_block_rate_c > 0.0, "per_block_rate_c", "must be positive");
  require_range(c.weight_range, "weight_range", 1);
  require_range(c.lifetime_range, "lifetime_range", 1);
  require_range(c.deadline_range, "deadline_range", 1);
  require_range(c.cpu_demand_range, "cpu_demand_range", 0);
  require_range(c.rate_blocks_range, "rate_blocks_range", 1);
  require(c.max_snr_range.lo <= c.max_snr_range.hi, "max_snr_range", "empty range");
  if (!c.fixed_weights.empty()) {
    require(static_cast<int>(c.fixed_weights.size()) == c.n_ues, "fixed_weights",
            "needs one weight per UE");
    for (int w : c.fixed_weights) require(w >= 1, "fixed_weights", "weights must be >= 1");
  }
  require(!c.ber_curve.empty(), "ber_curve", "must have at least one point");
  require(c.agent.alpha > 0.0 && c.agent.alpha <= 1.0, "agent.alpha", "must be in (0, 1]");
  require(c.agent.gamma >= 0.0 && c.agent.gamma <= 1.0, "agent.gamma", "must be in [0, 1]");
  require(c.agent.epsilon >= 0.0 && c.agent.epsilon <= 1.0, "agent.epsilon", "must be in [0, 1]");
  require(c.agent.epsilon_final >= 0.0 && c.agent.epsilon_final <= 1.0, "agent.epsilon_final",
          "must be in [0, 1]");
  require(c.agent.kblocks_cap >= 1, "agent.kblocks_cap", "must be >= 1");
  require(c.agent.warmup_slots >= 0, "agent.warmup_slots", "must be >= 0");
  switch (c.incumbent.pattern) {
    case IncumbentPattern::kNone:
      break;
    case IncumbentPattern::kIid:
      require(c.incumbent.p_i >= 0.0 && c.incumbent.p_i <= 1.0, "incumbent.p_i",
              "must be in [0, 1]");
      break;
    case IncumbentPattern::kSession:
      require(c.incumbent.p_i >= 0.0 && c.incumbent.p_i < 1.0, "incumbent.p_i",
              "must be in [0, 1) for the session pattern");
      break;
  }
  if (c.topology) {
    require(c.topology->n_gnbs >= 1, "topology.n_gnbs", "must be >= 1");
    for (const auto& [a, b] : c.topology->neighbors) {
      require(a >= 0 && b >= 0 && a < c.topology->n_gnbs && b < c.topology->n_gnbs,
              "topology.neighbors", "pair references unknown gNodeB");
      require(a != b, "topology.neighbors", "self pair");
    }
  }
}

}  // namespace ranslice
