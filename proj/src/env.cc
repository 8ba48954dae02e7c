#include "ranslice/env.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ranslice/errors.h"

namespace ranslice {

EnvState EnvState::make(const ScenarioConfig& config) {
  EnvState s;
  s.pool = ResourcePool::full(config.n_blocks, config.cpu_levels, config.power_budget);
  s.counters.per_ue_served.assign(static_cast<size_t>(config.n_ues), 0);
  return s;
}

std::vector<SliceRequest> generate_arrivals(Stream& occurrence, Stream& attributes,
                                            const ScenarioConfig& config, int64_t slot) {
  if (!(config.arrival_rate >= 0.0 && config.arrival_rate <= 1.0)) {
    throw ConfigError("must be in [0, 1]", "arrival_rate");
  }
  std::vector<SliceRequest> out;
  for (int ue = 0; ue < config.n_ues; ++ue) {
    if (!occurrence.bernoulli(config.arrival_rate)) continue;
    SliceRequest r;
    r.ue_id = ue;
    r.req_id = slot * config.n_ues + ue;
    r.arrival_slot = slot;
    // Weight is drawn even when overridden so the remaining attributes do
    // not depend on the weight setting.
    r.weight = static_cast<int>(
        attributes.uniform_int(config.weight_range.lo, config.weight_range.hi));
    if (!config.fixed_weights.empty()) r.weight = config.fixed_weights[static_cast<size_t>(ue)];
    r.lifetime = static_cast<int>(
        attributes.uniform_int(config.lifetime_range.lo, config.lifetime_range.hi));
    r.deadline = static_cast<int>(
        attributes.uniform_int(config.deadline_range.lo, config.deadline_range.hi));
    r.cpu_demand = static_cast<int>(
        attributes.uniform_int(config.cpu_demand_range.lo, config.cpu_demand_range.hi));
    const auto k_req =
        attributes.uniform_int(config.rate_blocks_range.lo, config.rate_blocks_range.hi);
    r.demand_rate = static_cast<double>(k_req) * config.per_block_rate_c;
    r.max_snr_db = attributes.uniform_real(config.max_snr_range.lo, config.max_snr_range.hi);
    out.push_back(r);
  }
  return out;
}

Grant apply_grant(EnvState& state, const SliceRequest& request, const phy::Bundle& bundle,
                  const std::vector<int>* block_ids) {
  auto& pool = state.pool;
  if (bundle.num_blocks < 1 || bundle.power_level < 1 || bundle.cpu_levels < 0) {
    throw CapacityError("grant must allocate at least one block and one power level");
  }
  if (bundle.num_blocks > pool.free_blocks() || bundle.cpu_levels > pool.cpu_free ||
      bundle.power_level > pool.power_free) {
    throw CapacityError("bundle does not fit the pool");
  }

  Grant g;
  g.request = request;
  g.bundle = bundle;
  g.start_slot = state.slot;
  g.end_slot = state.slot + request.lifetime;
  if (block_ids != nullptr) {
    if (static_cast<int>(block_ids->size()) != bundle.num_blocks) {
      throw CapacityError("block list size does not match bundle");
    }
    for (int b : *block_ids) {
      if (b < 0 || b >= pool.n_blocks() || !pool.block_free[static_cast<size_t>(b)]) {
        throw CapacityError("block " + std::to_string(b) + " is not free");
      }
    }
    g.block_ids = *block_ids;
  } else {
    for (int b = 0; b < pool.n_blocks() && static_cast<int>(g.block_ids.size()) < bundle.num_blocks;
         ++b) {
      if (pool.block_free[static_cast<size_t>(b)]) g.block_ids.push_back(b);
    }
  }
  for (int b : g.block_ids) pool.block_free[static_cast<size_t>(b)] = false;
  pool.cpu_free -= bundle.cpu_levels;
  pool.power_free -= bundle.power_level;

  auto it = std::find_if(state.queue.begin(), state.queue.end(), [&](const SliceRequest& q) {
    return q.ue_id == request.ue_id && q.req_id == request.req_id;
  });
  if (it != state.queue.end()) state.queue.erase(it);

  state.cum_utility += request.weight;
  ++state.counters.granted;
  if (request.ue_id >= 0 &&
      static_cast<size_t>(request.ue_id) < state.counters.per_ue_served.size()) {
    ++state.counters.per_ue_served[static_cast<size_t>(request.ue_id)];
  }
  state.active.push_back(g);
  return g;
}

ResourceTotals release_completed(EnvState& state) {
  ResourceTotals released;
  auto& pool = state.pool;
  auto done = std::stable_partition(state.active.begin(), state.active.end(),
                                    [&](const Grant& g) { return g.end_slot != state.slot; });
  for (auto it = done; it != state.active.end(); ++it) {
    for (int b : it->block_ids) pool.block_free[static_cast<size_t>(b)] = true;
    pool.cpu_free += it->bundle.cpu_levels;
    pool.power_free += it->bundle.power_level;
    released += ResourceTotals{it->bundle.num_blocks, it->bundle.cpu_levels,
                               it->bundle.power_level};
  }
  state.active.erase(done, state.active.end());
  return released;
}

std::vector<SliceRequest> expire_deadlines(EnvState& state) {
  std::vector<SliceRequest> expired;
  auto keep = std::stable_partition(state.queue.begin(), state.queue.end(),
                                    [&](const SliceRequest& r) {
                                      return state.slot - r.arrival_slot < r.deadline;
                                    });
  expired.assign(keep, state.queue.end());
  state.queue.erase(keep, state.queue.end());
  state.counters.expired += static_cast<int64_t>(expired.size());
  return expired;
}

void apply_mask(ResourcePool& pool, const std::vector<bool>& mask) {
  if (static_cast<int>(mask.size()) != pool.n_blocks()) {
    throw std::invalid_argument("mask length does not match pool");
  }
  for (size_t b = 0; b < mask.size(); ++b) {
    if (pool.block_masked[b]) {
      pool.block_masked[b] = false;
      pool.block_free[b] = true;
    }
    if (mask[b] && pool.block_free[b]) {
      pool.block_free[b] = false;
      pool.block_masked[b] = true;
    }
  }
}

SlotReport begin_slot(EnvState& state, std::vector<SliceRequest> new_arrivals,
                      const std::vector<bool>* mask) {
  SlotReport report;
  report.slot = state.slot;
  report.released = release_completed(state);
  report.expired = static_cast<int>(expire_deadlines(state).size());

  const int masked_before = state.pool.masked_blocks();
  if (mask != nullptr) {
    apply_mask(state.pool, *mask);
    state.incumbent_blocks = static_cast<int>(std::count(mask->begin(), mask->end(), true));
  } else {
    apply_mask(state.pool, std::vector<bool>(static_cast<size_t>(state.pool.n_blocks()), false));
    state.incumbent_blocks = 0;
  }
  report.masked_delta = state.pool.masked_blocks() - masked_before;

  report.arrived = static_cast<int>(new_arrivals.size());
  state.counters.arrived += report.arrived;
  for (auto& r : new_arrivals) state.queue.push_back(std::move(r));
  std::stable_sort(state.queue.begin(), state.queue.end(), arrives_before);
  return report;
}

void finish_slot(EnvState& state, SlotReport& report, int64_t granted_before) {
  for (const auto& g : state.active) {
    if (g.start_slot == state.slot) {
      report.allocated += ResourceTotals{g.bundle.num_blocks, g.bundle.cpu_levels,
                                         g.bundle.power_level};
    }
  }
  report.granted = static_cast<int>(state.counters.granted - granted_before);
  if (state.check_invariants) check_conservation(state);
  ++state.slot;
}

SlotReport advance_slot(EnvState& state, std::vector<SliceRequest> new_arrivals,
                        const std::vector<bool>* mask, const AllocateStep& allocate) {
  const int64_t granted_before = state.counters.granted;
  SlotReport report = begin_slot(state, std::move(new_arrivals), mask);
  if (allocate) allocate(state);
  finish_slot(state, report, granted_before);
  return report;
}

void check_conservation(const EnvState& state) {
  const auto& pool = state.pool;
  const auto n = static_cast<size_t>(pool.n_blocks());
  std::vector<int> holders(n, 0);
  ResourceTotals held;
  for (const auto& g : state.active) {
    if (static_cast<int>(g.block_ids.size()) != g.bundle.num_blocks) {
      throw std::logic_error("grant block list does not match its bundle");
    }
    for (int b : g.block_ids) ++holders[static_cast<size_t>(b)];
    held += ResourceTotals{g.bundle.num_blocks, g.bundle.cpu_levels, g.bundle.power_level};
    if (g.end_slot != g.start_slot + g.request.lifetime) {
      throw std::logic_error("grant end slot inconsistent with lifetime");
    }
  }
  for (size_t b = 0; b < n; ++b) {
    const int states = (pool.block_free[b] ? 1 : 0) + (pool.block_masked[b] ? 1 : 0) + holders[b];
    if (states != 1) {
      throw std::logic_error("block " + std::to_string(b) +
                             " is not in exactly one of free/masked/held");
    }
  }
  if (pool.cpu_capacity - pool.cpu_free != held.cpu || pool.cpu_free < 0) {
    throw std::logic_error("cpu conservation violated");
  }
  if (pool.power_capacity - pool.power_free != held.power || pool.power_free < 0) {
    throw std::logic_error("power conservation violated");
  }
  const auto& c = state.counters;
  if (c.arrived != c.granted + c.expired + static_cast<int64_t>(state.queue.size())) {
    throw std::logic_error("arrived != granted + expired + queued");
  }
  for (const auto& r : state.queue) {
    if (state.slot - r.arrival_slot >= r.deadline) {
      throw std::logic_error("queue holds a request past its deadline");
    }
  }
}

}  // namespace ranslice
