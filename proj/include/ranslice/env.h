#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ranslice/config.h"
#include "ranslice/phy.h"
#include "ranslice/resource_pool.h"
#include "ranslice/rng.h"

namespace ranslice {

/// One slice request from a UE.
struct SliceRequest {
  int ue_id = 0;
  int64_t req_id = 0;
  int weight = 1;
  double demand_rate = 0.0;  // bits/s
  int cpu_demand = 0;        // CPU levels (2% each)
  int deadline = 1;          // slots from arrival until service must start
  int lifetime = 1;          // slots of service once granted
  int64_t arrival_slot = 0;
  double max_snr_db = 3.0;   // received SNR at full transmit power

  phy::LinkBudget link_budget(int power_levels) const { return {max_snr_db, power_levels}; }
};

/// Queue order: arrival slot, then UE, then request id.
inline bool arrives_before(const SliceRequest& a, const SliceRequest& b) {
  if (a.arrival_slot != b.arrival_slot) return a.arrival_slot < b.arrival_slot;
  if (a.ue_id != b.ue_id) return a.ue_id < b.ue_id;
  return a.req_id < b.req_id;
}

struct Grant {
  SliceRequest request;
  phy::Bundle bundle;
  std::vector<int> block_ids;
  int64_t start_slot = 0;
  int64_t end_slot = 0;  // start_slot + lifetime; resources return at this slot
};

/// Per-resource totals (blocks, CPU levels, power units).
struct ResourceTotals {
  int blocks = 0;
  int cpu = 0;
  int power = 0;

  ResourceTotals& operator+=(const ResourceTotals& o) {
    blocks += o.blocks;
    cpu += o.cpu;
    power += o.power;
    return *this;
  }
  friend bool operator==(const ResourceTotals&, const ResourceTotals&) = default;
};

struct EnvCounters {
  int64_t arrived = 0;
  int64_t granted = 0;
  int64_t expired = 0;
  std::vector<int64_t> per_ue_served;
};

/// World state of one gNodeB.
struct EnvState {
  int64_t slot = 0;
  ResourcePool pool;
  std::vector<SliceRequest> queue;  // kept in arrives_before order
  std::vector<Grant> active;
  int64_t cum_utility = 0;
  EnvCounters counters;
  // Incumbent-occupied blocks as reported by the last mask (held or not).
  int incumbent_blocks = 0;
  // Verify conservation after every slot step.
  bool check_invariants = false;

  static EnvState make(const ScenarioConfig& config);
};

/// Draws this slot's arrivals. Each UE arrives with probability
/// arrival_rate (drawn from `occurrence`, one draw per UE per slot); the
/// attributes of an arriving request are drawn from `attributes` in the
/// order weight, lifetime, deadline, cpu demand, rate blocks, max SNR.
/// Throws ConfigError if arrival_rate is outside [0, 1].
std::vector<SliceRequest> generate_arrivals(Stream& occurrence, Stream& attributes,
                                            const ScenarioConfig& config, int64_t slot);

/// Grants `request` the bundle, taking the lowest-indexed free blocks unless
/// `block_ids` is given. Removes the request from the queue if present.
/// Throws CapacityError if the bundle is empty or does not fit.
Grant apply_grant(EnvState& state, const SliceRequest& request, const phy::Bundle& bundle,
                  const std::vector<int>* block_ids = nullptr);

/// Ends every grant whose end_slot is the current slot and returns the
/// released totals.
ResourceTotals release_completed(EnvState& state);

/// Drops queued requests that waited at least their deadline.
std::vector<SliceRequest> expire_deadlines(EnvState& state);

/// Makes the blocks in `mask` unavailable for this slot and lifts the
/// previous slot's mask. Blocks held by grants are left alone.
void apply_mask(ResourcePool& pool, const std::vector<bool>& mask);

/// What happened inside one slot, for metrics and telescoping checks.
struct SlotReport {
  int64_t slot = 0;
  ResourceTotals released;
  ResourceTotals allocated;
  int expired = 0;
  int granted = 0;
  int arrived = 0;
  int masked_delta = 0;  // change in masked free blocks (+ = more masked)
};

using AllocateStep = std::function<void(EnvState&)>;

/// Steps (1)-(4) of a slot: release, expire, mask, enqueue.
SlotReport begin_slot(EnvState& state, std::vector<SliceRequest> new_arrivals,
                      const std::vector<bool>* mask);

/// Step (6): fills the allocation totals of `report`, checks conservation
/// when enabled and advances the slot counter.
void finish_slot(EnvState& state, SlotReport& report, int64_t granted_before);

/// Advances one slot: release, expire, mask, enqueue, allocate, tick.
/// `mask` may be null when no block is masked.
SlotReport advance_slot(EnvState& state, std::vector<SliceRequest> new_arrivals,
                        const std::vector<bool>* mask, const AllocateStep& allocate);

/// Throws std::logic_error describing the first conservation violation.
void check_conservation(const EnvState& state);

}  // namespace ranslice
