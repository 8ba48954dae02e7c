#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ranslice/config.h"
#include "ranslice/env.h"
#include "ranslice/knapsack.h"
#include "ranslice/phy.h"
#include "ranslice/rng.h"

namespace ranslice::alloc {

/// Minimal bundle for a request against the pool's current free counts.
std::optional<phy::Bundle> request_bundle(const SliceRequest& request, const ResourcePool& pool,
                                          const phy::PhyContext& phy);

// ---------------------------------------------------------------------------
// Q-learning

/// Learning state seen by the agent when it considers one request.
struct DecisionState {
  int free_blocks = 0;
  int cpu_bucket = 0;  // free CPU levels / 5
  int power_free = 0;
  int req_weight = 0;
  int req_kblocks = 0;  // blocks of the request's minimal bundle, capped

  friend bool operator==(const DecisionState&, const DecisionState&) = default;
  uint64_t key() const;
};

inline constexpr int kCpuBucketWidth = 5;
/// req_kblocks value used when the request has no feasible bundle.
inline constexpr int kInfeasibleKBlocks = 0;

DecisionState discretize(const ResourcePool& pool, const SliceRequest& request,
                         const std::optional<phy::Bundle>& min_bundle, int kblocks_cap = 3);

enum class Action : int { kGrant = 0, kDefer = 1 };

/// Q-values keyed by DecisionState. Entries not yet touched are drawn
/// uniformly from [0, 1) on first access, grant value first.
class QTable {
 public:
  explicit QTable(Stream init) : init_(init) {}

  double get(const DecisionState& s, Action a);
  void set(const DecisionState& s, Action a, double v);
  double max_value(const DecisionState& s);
  /// Greedy action; ties go to kGrant.
  Action best_action(const DecisionState& s);

  size_t size() const { return table_.size(); }
  /// Whether `s` has been materialized (read or written).
  bool contains(const DecisionState& s) const { return table_.count(s.key()) != 0; }

 private:
  std::array<double, 2>& entry(const DecisionState& s);

  Stream init_;
  std::unordered_map<uint64_t, std::array<double, 2>> table_;
};

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s_next, a') - Q(s,a)).
void q_update(QTable& q, const DecisionState& s, Action a, double r, const DecisionState& s_next,
              const AgentConfig& cfg);

/// Same update with an explicit discount on the bootstrap term.
void q_update(QTable& q, const DecisionState& s, Action a, double r, const DecisionState& s_next,
              double alpha, double discount);

// ---------------------------------------------------------------------------
// Allocation policies

/// One allocation policy bound to one environment.
class Allocator {
 public:
  virtual ~Allocator() = default;
  /// Step (5) of a slot: grant queued requests. Returns the grants made.
  virtual std::vector<Grant> allocate(EnvState& env) = 0;
  virtual AllocatorKind kind() const = 0;
};

std::vector<Grant> myopic_slot(EnvState& env, const phy::PhyContext& phy);
std::vector<Grant> fcfs_slot(EnvState& env, const phy::PhyContext& phy);
std::vector<Grant> random_slot(EnvState& env, Stream& rng, const phy::PhyContext& phy);

/// Snapshot of one myopic decision: the queued requests that fit alone,
/// each with its undominated bundles (see phy::bundle_options), and the
/// free capacity.
struct MyopicInstance {
  std::vector<size_t> queue_index;  // position in env.queue per item
  std::vector<knapsack::Item> items;
  knapsack::Capacity capacity;
};

MyopicInstance myopic_instance(const EnvState& env, const phy::PhyContext& phy);

/// Exhaustive oracle for the myopic objective. Throws std::length_error for
/// more than knapsack::kMaxBruteForceItems candidates.
knapsack::Selection myopic_bruteforce(const MyopicInstance& instance);

/// Tabular Q-learning over per-request grant/defer decisions.
///
/// Each slot the queue is considered in decision order (weight descending,
/// then arrival, then UE). A request whose minimal bundle does not fit is
/// skipped without an update. Otherwise the agent picks grant or defer
/// epsilon-greedily and receives the request weight on grant, zero on defer.
/// The transition of a decision is completed at the next decision, which may
/// fall in a later slot; the bootstrap term is discounted by gamma once per
/// decision.
class QLearningAllocator : public Allocator {
 public:
  QLearningAllocator(const AgentConfig& cfg, phy::PhyContext phy, Stream explore, Stream init,
                     int horizon_slots);

  std::vector<Grant> allocate(EnvState& env) override;
  AllocatorKind kind() const override { return AllocatorKind::kQLearning; }

  /// Completes the outstanding transition against the state it would face
  /// now; call before discarding the allocator or switching environments.
  void flush(const EnvState& env);

  QTable& table() { return q_; }
  const AgentConfig& config() const { return cfg_; }
  int64_t updates() const { return updates_; }
  double current_epsilon() const;

  /// Restart the epsilon schedule (used after a warm-up phase).
  void reset_schedule(int horizon_slots);

 private:
  struct Pending {
    DecisionState s;
    Action a;
    double r;
  };
  void complete(const DecisionState& s_next);

  AgentConfig cfg_;
  phy::PhyContext phy_;
  Stream explore_;
  QTable q_;
  int horizon_slots_;
  int64_t slots_seen_ = 0;
  int64_t updates_ = 0;
  std::optional<Pending> pending_;
};

class MyopicAllocator : public Allocator {
 public:
  explicit MyopicAllocator(phy::PhyContext phy) : phy_(std::move(phy)) {}
  std::vector<Grant> allocate(EnvState& env) override { return myopic_slot(env, phy_); }
  AllocatorKind kind() const override { return AllocatorKind::kMyopic; }

 private:
  phy::PhyContext phy_;
};

class FcfsAllocator : public Allocator {
 public:
  explicit FcfsAllocator(phy::PhyContext phy) : phy_(std::move(phy)) {}
  std::vector<Grant> allocate(EnvState& env) override { return fcfs_slot(env, phy_); }
  AllocatorKind kind() const override { return AllocatorKind::kFcfs; }

 private:
  phy::PhyContext phy_;
};

class RandomAllocator : public Allocator {
 public:
  RandomAllocator(phy::PhyContext phy, Stream rng) : phy_(std::move(phy)), rng_(rng) {}
  std::vector<Grant> allocate(EnvState& env) override { return random_slot(env, rng_, phy_); }
  AllocatorKind kind() const override { return AllocatorKind::kRandom; }

 private:
  phy::PhyContext phy_;
  Stream rng_;
};

/// Builds the configured allocator with its named substreams
/// ("explore", "qinit", "random_alloc") derived from `seed`.
std::unique_ptr<Allocator> make_allocator(const ScenarioConfig& config, uint64_t seed);

}  // namespace ranslice::alloc
