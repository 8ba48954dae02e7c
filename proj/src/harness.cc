#include "ranslice/harness.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ranslice/allocators.h"
#include "ranslice/coordination.h"
#include "ranslice/env.h"
#include "ranslice/errors.h"
#include "ranslice/incumbent.h"

namespace ranslice::harness {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

template <typename T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("wrong type: ") + e.what(), path);
  }
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError("expected an integer", path);
  return get_as<int>(j, path);
}

double get_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("expected a number", path);
  return get_as<double>(j, path);
}

IntRange get_int_range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected [lo, hi]", path);
  return {get_int(j[0], path + "[0]"), get_int(j[1], path + "[1]")};
}

RealRange get_real_range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected [lo, hi]", path);
  return {get_real(j[0], path + "[0]"), get_real(j[1], path + "[1]")};
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError("expected an object", prefix.empty() ? "<root>" : prefix);
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown field", prefix.empty() ? key : prefix + "." + key);
    }
  }
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, end);
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t parse_hex64(const std::string& s) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc()) throw std::runtime_error("bad fingerprint '" + s + "'");
  return v;
}

}  // namespace

ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  check_keys(j,
             {"n_ues", "arrival_rate", "horizon_slots", "n_blocks", "cpu_levels", "power_budget",
              "power_levels", "per_block_rate_c", "weight_range", "lifetime_range",
              "deadline_range", "cpu_demand_range", "rate_blocks_range", "fixed_weights",
              "max_snr_range", "ber_curve", "agent", "allocator", "incumbent", "topology", "seed"},
             "");
  if (j.contains("n_ues")) c.n_ues = get_int(j["n_ues"], "n_ues");
  if (j.contains("arrival_rate")) c.arrival_rate = get_real(j["arrival_rate"], "arrival_rate");
  if (j.contains("horizon_slots")) c.horizon_slots = get_int(j["horizon_slots"], "horizon_slots");
  if (j.contains("n_blocks")) c.n_blocks = get_int(j["n_blocks"], "n_blocks");
  if (j.contains("cpu_levels")) c.cpu_levels = get_int(j["cpu_levels"], "cpu_levels");
  if (j.contains("power_budget")) c.power_budget = get_int(j["power_budget"], "power_budget");
  if (j.contains("power_levels")) c.power_levels = get_int(j["power_levels"], "power_levels");
  if (j.contains("per_block_rate_c")) {
    c.per_block_rate_c = get_real(j["per_block_rate_c"], "per_block_rate_c");
  }
  if (j.contains("weight_range")) c.weight_range = get_int_range(j["weight_range"], "weight_range");
  if (j.contains("lifetime_range")) {
    c.lifetime_range = get_int_range(j["lifetime_range"], "lifetime_range");
  }
  if (j.contains("deadline_range")) {
    c.deadline_range = get_int_range(j["deadline_range"], "deadline_range");
  }
  if (j.contains("cpu_demand_range")) {
    c.cpu_demand_range = get_int_range(j["cpu_demand_range"], "cpu_demand_range");
  }
  if (j.contains("rate_blocks_range")) {
    c.rate_blocks_range = get_int_range(j["rate_blocks_range"], "rate_blocks_range");
  }
  if (j.contains("fixed_weights") && !j["fixed_weights"].is_null()) {
    const auto& fw = j["fixed_weights"];
    if (!fw.is_array()) throw ConfigError("expected an array", "fixed_weights");
    for (size_t i = 0; i < fw.size(); ++i) {
      c.fixed_weights.push_back(get_int(fw[i], "fixed_weights[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("max_snr_range")) {
    c.max_snr_range = get_real_range(j["max_snr_range"], "max_snr_range");
  }
  if (j.contains("ber_curve")) {
    const auto& bc = j["ber_curve"];
    if (bc.is_string()) {
      std::filesystem::path p = bc.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.ber_curve = phy::BerCurve::from_csv_file(p.string());
    } else if (bc.is_array()) {
      std::vector<phy::BerCurve::Point> pts;
      for (size_t i = 0; i < bc.size(); ++i) {
        const std::string path = "ber_curve[" + std::to_string(i) + "]";
        if (!bc[i].is_array() || bc[i].size() != 2) throw ConfigError("expected [snr_db, ber]", path);
        pts.emplace_back(get_real(bc[i][0], path), get_real(bc[i][1], path));
      }
      try {
        c.ber_curve = phy::BerCurve(std::move(pts));
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), "ber_curve");
      }
    } else {
      throw ConfigError("expected a file path or a list of points", "ber_curve");
    }
  }
  if (j.contains("agent")) {
    const auto& a = j["agent"];
    check_keys(a, {"alpha", "gamma", "epsilon", "epsilon_final", "kblocks_cap", "warmup_slots"},
               "agent");
    if (a.contains("alpha")) c.agent.alpha = get_real(a["alpha"], "agent.alpha");
    if (a.contains("gamma")) c.agent.gamma = get_real(a["gamma"], "agent.gamma");
    if (a.contains("epsilon")) {
      c.agent.epsilon = get_real(a["epsilon"], "agent.epsilon");
      c.agent.epsilon_final = c.agent.epsilon;
    }
    if (a.contains("epsilon_final")) {
      c.agent.epsilon_final = get_real(a["epsilon_final"], "agent.epsilon_final");
    }
    if (a.contains("kblocks_cap")) c.agent.kblocks_cap = get_int(a["kblocks_cap"], "agent.kblocks_cap");
    if (a.contains("warmup_slots")) {
      c.agent.warmup_slots = get_int(a["warmup_slots"], "agent.warmup_slots");
    }
  }
  if (j.contains("allocator")) {
    if (!j["allocator"].is_string()) throw ConfigError("expected a string", "allocator");
    c.allocator = parse_allocator(j["allocator"].get<std::string>());
  }
  if (j.contains("incumbent")) {
    const auto& inc = j["incumbent"];
    check_keys(inc, {"pattern", "p_i"}, "incumbent");
    if (inc.contains("pattern")) {
      if (!inc["pattern"].is_string()) throw ConfigError("expected a string", "incumbent.pattern");
      c.incumbent.pattern = parse_incumbent_pattern(inc["pattern"].get<std::string>());
    }
    if (inc.contains("p_i")) c.incumbent.p_i = get_real(inc["p_i"], "incumbent.p_i");
  }
  if (j.contains("topology") && !j["topology"].is_null()) {
    const auto& t = j["topology"];
    check_keys(t, {"n_gnbs", "neighbors"}, "topology");
    TopologyConfig tc;
    if (t.contains("n_gnbs")) tc.n_gnbs = get_int(t["n_gnbs"], "topology.n_gnbs");
    if (t.contains("neighbors")) {
      const auto& nb = t["neighbors"];
      if (!nb.is_array()) throw ConfigError("expected a list of pairs", "topology.neighbors");
      for (size_t i = 0; i < nb.size(); ++i) {
        const std::string path = "topology.neighbors[" + std::to_string(i) + "]";
        if (!nb[i].is_array() || nb[i].size() != 2) throw ConfigError("expected [a, b]", path);
        tc.neighbors.emplace_back(get_int(nb[i][0], path), get_int(nb[i][1], path));
      }
    }
    c.topology = tc;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError("expected an integer", "seed");
    }
    c.seed = get_as<uint64_t>(j["seed"], "seed");
  }
  validate(c);
  return c;
}

ScenarioConfig config_from_json(const json& j) { return config_from_json(j, {}); }

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error in ") + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["n_ues"] = c.n_ues;
  j["arrival_rate"] = c.arrival_rate;
  j["horizon_slots"] = c.horizon_slots;
  j["n_blocks"] = c.n_blocks;
  j["cpu_levels"] = c.cpu_levels;
  j["power_budget"] = c.power_budget;
  j["power_levels"] = c.power_levels;
  j["per_block_rate_c"] = c.per_block_rate_c;
  j["weight_range"] = {c.weight_range.lo, c.weight_range.hi};
  j["lifetime_range"] = {c.lifetime_range.lo, c.lifetime_range.hi};
  j["deadline_range"] = {c.deadline_range.lo, c.deadline_range.hi};
  j["cpu_demand_range"] = {c.cpu_demand_range.lo, c.cpu_demand_range.hi};
  j["rate_blocks_range"] = {c.rate_blocks_range.lo, c.rate_blocks_range.hi};
  j["fixed_weights"] = c.fixed_weights.empty() ? json(nullptr) : json(c.fixed_weights);
  j["max_snr_range"] = {c.max_snr_range.lo, c.max_snr_range.hi};
  json curve = json::array();
  for (const auto& [snr, ber] : c.ber_curve.points()) curve.push_back({snr, ber});
  j["ber_curve"] = curve;
  j["agent"] = {{"alpha", c.agent.alpha},
                {"gamma", c.agent.gamma},
                {"epsilon", c.agent.epsilon},
                {"epsilon_final", c.agent.epsilon_final},
                {"kblocks_cap", c.agent.kblocks_cap},
                {"warmup_slots", c.agent.warmup_slots}};
  j["allocator"] = std::string(to_string(c.allocator));
  j["incumbent"] = {{"pattern", std::string(to_string(c.incumbent.pattern))},
                    {"p_i", c.incumbent.p_i}};
  if (c.topology) {
    json nb = json::array();
    for (const auto& [a, b] : c.topology->neighbors) nb.push_back({a, b});
    j["topology"] = {{"n_gnbs", c.topology->n_gnbs}, {"neighbors", nb}};
  } else {
    j["topology"] = nullptr;
  }
  j["seed"] = c.seed;
  return j;
}

// ---------------------------------------------------------------------------
// Running

namespace {

uint64_t fingerprint_request(const SliceRequest& r, uint64_t h) {
  h = fnv1a_u64(static_cast<uint64_t>(r.ue_id), h);
  h = fnv1a_u64(static_cast<uint64_t>(r.req_id), h);
  h = fnv1a_u64(static_cast<uint64_t>(r.weight), h);
  h = fnv1a_u64(std::bit_cast<uint64_t>(r.demand_rate), h);
  h = fnv1a_u64(static_cast<uint64_t>(r.cpu_demand), h);
  h = fnv1a_u64(static_cast<uint64_t>(r.deadline), h);
  h = fnv1a_u64(static_cast<uint64_t>(r.lifetime), h);
  h = fnv1a_u64(static_cast<uint64_t>(r.arrival_slot), h);
  h = fnv1a_u64(std::bit_cast<uint64_t>(r.max_snr_db), h);
  return h;
}

struct PoolCounts {
  int blocks, cpu, power;
};

PoolCounts counts(const ResourcePool& p) { return {p.free_blocks(), p.cpu_free, p.power_free}; }

// Resource telescoping across the slot plus grant-time QoE and placement.
void verify_slot(const PoolCounts& before, const EnvState& env, const SlotReport& report,
                 const std::vector<Grant>& grants, const std::vector<bool>& mask,
                 const phy::PhyContext& phy) {
  const PoolCounts after = counts(env.pool);
  if (after.blocks != before.blocks + report.released.blocks - report.allocated.blocks -
                          report.masked_delta ||
      after.cpu != before.cpu + report.released.cpu - report.allocated.cpu ||
      after.power != before.power + report.released.power - report.allocated.power) {
    throw std::logic_error("resource telescoping violated at slot " +
                           std::to_string(report.slot));
  }
  for (const auto& g : grants) {
    const auto& r = g.request;
    if (g.bundle.cpu_levels != r.cpu_demand) {
      throw std::logic_error("grant cpu differs from demand");
    }
    const auto snr = phy::snr_at_power(r.link_budget(phy.power_levels), g.bundle.power_level);
    if (!snr || phy::effective_rate(phy.per_block_rate_c, g.bundle.num_blocks,
                                    phy.curve.at(*snr)) < r.demand_rate) {
      throw std::logic_error("grant does not meet the rate demand");
    }
    for (int b : g.block_ids) {
      if (mask[static_cast<size_t>(b)]) throw std::logic_error("grant placed on a masked block");
    }
  }
}

MetricsRecord make_record(const EnvState& env, const SlotReport& report) {
  MetricsRecord m;
  m.slot = report.slot;
  m.granted = report.granted;
  m.expired = report.expired;
  m.cum_utility = env.cum_utility;
  m.free_blocks = env.pool.free_blocks();
  m.free_cpu = env.pool.cpu_free;
  m.free_power = env.pool.power_free;
  m.incumbent_blocks = env.incumbent_blocks;
  return m;
}

void warm_up(alloc::QLearningAllocator& agent, const ScenarioConfig& config) {
  const int slots = config.agent.warmup_slots;
  agent.reset_schedule(slots);
  EnvState env = EnvState::make(config);
  Stream occ = Stream::derive(config.seed, "warmup/arrivals");
  Stream attr = Stream::derive(config.seed, "warmup/attributes");
  incumbent::IncumbentSource inc(config.incumbent, config.n_blocks,
                                 Stream::derive(config.seed, "warmup/incumbent"));
  for (int t = 0; t < slots; ++t) {
    auto arrivals = generate_arrivals(occ, attr, config, t);
    const auto mask = inc.next();
    advance_slot(env, std::move(arrivals), &mask, [&](EnvState& e) { agent.allocate(e); });
  }
  agent.flush(env);
  agent.reset_schedule(config.horizon_slots);
}

RunResult run_single(const ScenarioConfig& config, const RunOptions& options) {
  RunResult result;
  EnvState env = EnvState::make(config);
  env.check_invariants = options.check_invariants;
  auto allocator = alloc::make_allocator(config, config.seed);
  auto* agent = dynamic_cast<alloc::QLearningAllocator*>(allocator.get());
  if (agent != nullptr && config.agent.warmup_slots > 0) warm_up(*agent, config);

  const auto phy = config.phy_context();
  Stream occ = Stream::derive(config.seed, "arrivals");
  Stream attr = Stream::derive(config.seed, "attributes");
  incumbent::IncumbentSource inc(config.incumbent, config.n_blocks,
                                 Stream::derive(config.seed, "incumbent"));
  uint64_t arrival_fp = kFnvOffset;
  result.records.reserve(static_cast<size_t>(config.horizon_slots));

  for (int t = 0; t < config.horizon_slots; ++t) {
    auto arrivals = generate_arrivals(occ, attr, config, t);
    for (const auto& r : arrivals) arrival_fp = fingerprint_request(r, arrival_fp);
    const auto mask = inc.next();
    const PoolCounts before = counts(env.pool);
    std::vector<Grant> grants;
    const SlotReport report = advance_slot(env, std::move(arrivals), &mask,
                                           [&](EnvState& e) { grants = allocator->allocate(e); });
    if (options.check_invariants) verify_slot(before, env, report, grants, mask, phy);
    result.records.push_back(make_record(env, report));
  }
  if (agent != nullptr) agent->flush(env);

  auto& s = result.summary;
  s.total_utility = env.cum_utility;
  s.per_ue_served = env.counters.per_ue_served;
  s.arrived = env.counters.arrived;
  s.granted = env.counters.granted;
  s.expired = env.counters.expired;
  s.queue_remaining = static_cast<int64_t>(env.queue.size());
  s.arrival_fingerprint = arrival_fp;
  s.incumbent_fingerprint = inc.fingerprint();
  return result;
}

// Several gNodeBs in lockstep: each plans against its own pool with
// neighbour-held blocks masked, a resolver drops conflicting plans, and the
// survivors are committed.
RunResult run_multi(const ScenarioConfig& config, const RunOptions& options) {
  RunResult result;
  const coord::Topology topo = coord::Topology::from_config(*config.topology);
  const auto n = static_cast<size_t>(topo.n_gnbs());
  const auto phy = config.phy_context();

  std::vector<EnvState> envs;
  std::vector<std::unique_ptr<alloc::Allocator>> allocators;
  std::vector<Stream> occ, attr;
  for (size_t g = 0; g < n; ++g) {
    envs.push_back(EnvState::make(config));
    envs.back().check_invariants = options.check_invariants;
    const std::string tag = "gnb/" + std::to_string(g);
    allocators.push_back(alloc::make_allocator(config, splitmix64(config.seed ^ fnv1a(tag))));
    occ.push_back(Stream::derive(config.seed, "arrivals/" + tag));
    attr.push_back(Stream::derive(config.seed, "attributes/" + tag));
  }
  incumbent::IncumbentSource inc(config.incumbent, config.n_blocks,
                                 Stream::derive(config.seed, "incumbent"));
  uint64_t arrival_fp = kFnvOffset;

  for (int t = 0; t < config.horizon_slots; ++t) {
    const auto radar = inc.next();
    // Blocks neighbours keep holding through this slot.
    std::vector<std::vector<bool>> usage(n, std::vector<bool>(static_cast<size_t>(config.n_blocks)));
    for (size_t g = 0; g < n; ++g) {
      for (const auto& gr : envs[g].active) {
        if (gr.end_slot > t) {
          for (int b : gr.block_ids) usage[g][static_cast<size_t>(b)] = true;
        }
      }
    }

    std::vector<SlotReport> reports(n);
    std::vector<int64_t> granted_before(n);
    std::vector<PoolCounts> before(n);
    std::vector<std::vector<bool>> masks(n);
    for (size_t g = 0; g < n; ++g) {
      auto arrivals = generate_arrivals(occ[g], attr[g], config, t);
      for (const auto& r : arrivals) arrival_fp = fingerprint_request(r, arrival_fp);
      masks[g] = coord::preprocess_mask(static_cast<int>(g), topo, usage);
      for (size_t b = 0; b < masks[g].size(); ++b) masks[g][b] = masks[g][b] || radar[b];
      granted_before[g] = envs[g].counters.granted;
      before[g] = counts(envs[g].pool);
      reports[g] = begin_slot(envs[g], std::move(arrivals), &masks[g]);
      envs[g].incumbent_blocks =
          static_cast<int>(std::count(radar.begin(), radar.end(), true));
    }

    std::vector<coord::PlannedAssignment> plans;
    std::map<std::pair<int, int64_t>, Grant> planned;
    for (size_t g = 0; g < n; ++g) {
      EnvState scratch = envs[g];
      scratch.check_invariants = false;
      for (auto& gr : allocators[g]->allocate(scratch)) {
        plans.push_back({static_cast<int>(g), gr.block_ids, gr.request.weight, gr.request.req_id});
        planned.emplace(std::make_pair(static_cast<int>(g), gr.request.req_id), std::move(gr));
      }
    }
    std::vector<std::vector<Grant>> committed(n);
    for (const auto& p : coord::resolve_conflicts(plans, topo)) {
      const Grant& gr = planned.at({p.gnb_id, p.request_key});
      auto& env = envs[static_cast<size_t>(p.gnb_id)];
      committed[static_cast<size_t>(p.gnb_id)].push_back(
          apply_grant(env, gr.request, gr.bundle, &gr.block_ids));
    }
    for (size_t g = 0; g < n; ++g) {
      finish_slot(envs[g], reports[g], granted_before[g]);
      if (options.check_invariants) {
        verify_slot(before[g], envs[g], reports[g], committed[g], masks[g], phy);
      }
    }
    if (options.check_invariants) {
      for (const auto& [a, b] : config.topology->neighbors) {
        for (const auto& ga : envs[static_cast<size_t>(a)].active) {
          for (const auto& gb : envs[static_cast<size_t>(b)].active) {
            for (int blk : ga.block_ids) {
              if (std::find(gb.block_ids.begin(), gb.block_ids.end(), blk) != gb.block_ids.end()) {
                throw std::logic_error("neighbouring gNodeBs hold the same block");
              }
            }
          }
        }
      }
    }

    MetricsRecord m;
    m.slot = t;
    for (size_t g = 0; g < n; ++g) {
      const auto r = make_record(envs[g], reports[g]);
      m.granted += r.granted;
      m.expired += r.expired;
      m.cum_utility += r.cum_utility;
      m.free_blocks += r.free_blocks;
      m.free_cpu += r.free_cpu;
      m.free_power += r.free_power;
    }
    m.incumbent_blocks = static_cast<int>(std::count(radar.begin(), radar.end(), true));
    result.records.push_back(m);
  }

  auto& s = result.summary;
  s.per_ue_served.assign(static_cast<size_t>(config.n_ues), 0);
  for (size_t g = 0; g < n; ++g) {
    if (auto* agent = dynamic_cast<alloc::QLearningAllocator*>(allocators[g].get())) {
      agent->flush(envs[g]);
    }
    s.total_utility += envs[g].cum_utility;
    s.arrived += envs[g].counters.arrived;
    s.granted += envs[g].counters.granted;
    s.expired += envs[g].counters.expired;
    s.queue_remaining += static_cast<int64_t>(envs[g].queue.size());
    for (size_t u = 0; u < s.per_ue_served.size(); ++u) {
      s.per_ue_served[u] += envs[g].counters.per_ue_served[u];
    }
  }
  s.arrival_fingerprint = arrival_fp;
  s.incumbent_fingerprint = inc.fingerprint();
  return result;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result = (config.topology && config.topology->n_gnbs > 1)
                         ? run_multi(config, options)
                         : run_single(config, options);
  auto& s = result.summary;
  s.seed = config.seed;
  s.allocator = std::string(to_string(config.allocator));
  s.config = config_to_json(config);
  s.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ---------------------------------------------------------------------------
// Experiments

std::vector<double> AllocatorStats::mean_per_ue_served() const {
  std::vector<double> mean;
  for (const auto& v : per_ue_served) {
    if (mean.size() < v.size()) mean.resize(v.size(), 0.0);
    for (size_t i = 0; i < v.size(); ++i) mean[i] += static_cast<double>(v[i]);
  }
  for (auto& m : mean) m /= static_cast<double>(std::max<size_t>(per_ue_served.size(), 1));
  return mean;
}

const AllocatorStats& Comparison::row(AllocatorKind kind) const {
  for (const auto& r : rows) {
    if (r.allocator == kind) return r;
  }
  throw std::out_of_range("allocator not in comparison: " + std::string(to_string(kind)));
}

double Comparison::improvement(AllocatorKind a, AllocatorKind b) const {
  const double mb = row(b).mean;
  return mb == 0.0 ? 0.0 : (row(a).mean - mb) / mb;
}

std::vector<uint64_t> seed_list(uint64_t base, int n_seeds) {
  std::vector<uint64_t> seeds;
  for (int i = 0; i < n_seeds; ++i) seeds.push_back(base + static_cast<uint64_t>(i));
  return seeds;
}

Comparison compare_allocators(const ScenarioConfig& config,
                              const std::vector<AllocatorKind>& allocators, int n_seeds) {
  if (n_seeds < 1) throw ConfigError("must be >= 1", "seeds");
  validate(config);
  const auto seeds = seed_list(config.seed, n_seeds);
  const int64_t jobs = static_cast<int64_t>(allocators.size()) * n_seeds;
  std::vector<SummaryReport> out(static_cast<size_t>(jobs));

#pragma omp parallel for schedule(dynamic)
  for (int64_t job = 0; job < jobs; ++job) {
    ScenarioConfig c = config;
    c.allocator = allocators[static_cast<size_t>(job / n_seeds)];
    c.seed = seeds[static_cast<size_t>(job % n_seeds)];
    out[static_cast<size_t>(job)] = run_scenario(c).summary;
  }

  Comparison cmp;
  for (size_t a = 0; a < allocators.size(); ++a) {
    AllocatorStats st;
    st.allocator = allocators[a];
    st.seeds = seeds;
    for (int s = 0; s < n_seeds; ++s) {
      const auto& rep = out[a * static_cast<size_t>(n_seeds) + static_cast<size_t>(s)];
      st.utilities.push_back(rep.total_utility);
      st.per_ue_served.push_back(rep.per_ue_served);
    }
    double sum = 0.0;
    for (auto u : st.utilities) sum += static_cast<double>(u);
    st.mean = sum / n_seeds;
    st.min = *std::min_element(st.utilities.begin(), st.utilities.end());
    st.max = *std::max_element(st.utilities.begin(), st.utilities.end());
    cmp.rows.push_back(std::move(st));
  }
  return cmp;
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "n_ues") return SweepParam::kNUes;
  if (name == "p_i") return SweepParam::kPI;
  if (name == "fixed_weights") return SweepParam::kFixedWeights;
  throw ConfigError("unsupported sweep parameter '" + std::string(name) +
                        "' (expected n_ues|p_i|fixed_weights)",
                    "param");
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kNUes: return "n_ues";
    case SweepParam::kPI: return "p_i";
    case SweepParam::kFixedWeights: return "fixed_weights";
  }
  return "?";
}

namespace {

std::vector<int> parse_weight_list(const std::string& v) {
  std::vector<int> w;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ';')) {
    try {
      w.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
      throw ConfigError("bad weight list '" + v + "'", "values");
    }
  }
  return w;
}

double parse_real(const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError("bad number '" + v + "'", "values");
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, SweepParam param,
                                const std::vector<std::string>& values,
                                const std::vector<AllocatorKind>& allocators, int n_seeds) {
  if (values.empty()) throw ConfigError("needs at least one value", "values");
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    ScenarioConfig c = config;
    switch (param) {
      case SweepParam::kNUes: {
        const double n = parse_real(v);
        c.n_ues = static_cast<int>(n);
        if (c.n_ues != n) throw ConfigError("n_ues must be an integer", "values");
        c.fixed_weights.clear();
        rows.push_back({v, c.incumbent.pattern, compare_allocators(c, allocators, n_seeds)});
        break;
      }
      case SweepParam::kPI: {
        c.incumbent.p_i = parse_real(v);
        for (auto pattern : {IncumbentPattern::kIid, IncumbentPattern::kSession}) {
          c.incumbent.pattern = pattern;
          rows.push_back({v, pattern, compare_allocators(c, allocators, n_seeds)});
        }
        break;
      }
      case SweepParam::kFixedWeights: {
        c.fixed_weights = parse_weight_list(v);
        c.n_ues = static_cast<int>(c.fixed_weights.size());
        rows.push_back({v, c.incumbent.pattern, compare_allocators(c, allocators, n_seeds)});
        break;
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& m : records) {
    out += std::to_string(m.slot) + ',' + std::to_string(m.granted) + ',' +
           std::to_string(m.expired) + ',' + std::to_string(m.cum_utility) + ',' +
           std::to_string(m.free_blocks) + ',' + std::to_string(m.free_cpu) + ',' +
           std::to_string(m.free_power) + ',' + std::to_string(m.incumbent_blocks) + '\n';
  }
  return out;
}

json summary_to_json(const SummaryReport& r) {
  json j;
  j["total_utility"] = r.total_utility;
  j["per_ue_served"] = r.per_ue_served;
  j["arrived"] = r.arrived;
  j["granted"] = r.granted;
  j["expired"] = r.expired;
  j["queue_remaining"] = r.queue_remaining;
  j["seed"] = r.seed;
  j["allocator"] = r.allocator;
  j["arrival_fingerprint"] = hex64(r.arrival_fingerprint);
  j["incumbent_fingerprint"] = hex64(r.incumbent_fingerprint);
  j["config"] = r.config;
  return j;
}

SummaryReport summary_from_json(const json& j) {
  SummaryReport r;
  r.total_utility = j.at("total_utility").get<int64_t>();
  r.per_ue_served = j.at("per_ue_served").get<std::vector<int64_t>>();
  r.arrived = j.at("arrived").get<int64_t>();
  r.granted = j.at("granted").get<int64_t>();
  r.expired = j.at("expired").get<int64_t>();
  r.queue_remaining = j.at("queue_remaining").get<int64_t>();
  r.seed = j.at("seed").get<uint64_t>();
  r.allocator = j.at("allocator").get<std::string>();
  r.arrival_fingerprint = parse_hex64(j.at("arrival_fingerprint").get<std::string>());
  r.incumbent_fingerprint = parse_hex64(j.at("incumbent_fingerprint").get<std::string>());
  r.config = j.at("config");
  return r;
}

namespace {

std::string stats_fields(const AllocatorStats& st) {
  return std::string(to_string(st.allocator)) + ',' + std::to_string(st.seeds.size()) + ',' +
         format_real(st.mean) + ',' + std::to_string(st.min) + ',' + std::to_string(st.max);
}

std::string served_field(const AllocatorStats& st) {
  std::string out;
  for (double v : st.mean_per_ue_served()) {
    if (!out.empty()) out += ';';
    out += format_real(v);
  }
  return out;
}

}  // namespace

std::string comparison_csv(const Comparison& cmp) {
  std::string out = "allocator,seeds,mean,min,max,reference,improvement_of_reference\n";
  if (cmp.rows.empty()) return out;
  const auto ref = cmp.rows.front().allocator;
  for (const auto& st : cmp.rows) {
    out += stats_fields(st) + ',' + std::string(to_string(ref)) + ',' +
           format_real(cmp.improvement(ref, st.allocator)) + '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,pattern,allocator,seeds,mean,min,max,mean_per_ue_served\n";
  for (const auto& row : rows) {
    for (const auto& st : row.comparison.rows) {
      out += row.value + ',' + std::string(to_string(row.pattern)) + ',' + stats_fields(st) +
             ',' + served_field(st) + '\n';
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::filesystem::path> write_outputs(const RunResult& result,
                                                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  const auto metrics = out_dir / "metrics.csv";
  const auto summary = out_dir / "summary.json";
  const auto timing = out_dir / "timing.json";
  write_file(metrics, metrics_csv(result.records));
  write_file(summary, summary_to_json(result.summary).dump(2) + "\n");
  write_file(timing, json{{"wall_time_ms", result.summary.wall_time_ms}}.dump(2) + "\n");
  return {metrics, summary, timing};
}

}  // namespace ranslice::harness
