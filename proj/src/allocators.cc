#include "ranslice/allocators.h"

#include <algorithm>
#include <numeric>

namespace ranslice::alloc {

std::optional<phy::Bundle> request_bundle(const SliceRequest& request, const ResourcePool& pool,
                                          const phy::PhyContext& phy) {
  return phy::min_bundle(request.demand_rate, request.cpu_demand,
                         request.link_budget(phy.power_levels), phy.curve, pool,
                         phy.per_block_rate_c);
}

// ---------------------------------------------------------------------------
// Q-learning

uint64_t DecisionState::key() const {
  // 12 bits per field is ample for every configured range.
  auto f = [](int v) { return static_cast<uint64_t>(v) & 0xfffU; };
  auto g = [](int v) { return static_cast<uint64_t>(v) & 0xffU; };
  return f(free_blocks) | f(cpu_bucket) << 12 | f(power_free) << 24 | g(req_weight) << 36 |
         g(req_kblocks) << 44;
}

DecisionState discretize(const ResourcePool& pool, const SliceRequest& request,
                         const std::optional<phy::Bundle>& min_bundle, int kblocks_cap) {
  DecisionState s;
  s.free_blocks = pool.free_blocks();
  s.cpu_bucket = pool.cpu_free / kCpuBucketWidth;
  s.power_free = pool.power_free;
  s.req_weight = request.weight;
  s.req_kblocks = min_bundle ? std::min(min_bundle->num_blocks, kblocks_cap) : kInfeasibleKBlocks;
  return s;
}

std::array<double, 2>& QTable::entry(const DecisionState& s) {
  auto [it, inserted] = table_.try_emplace(s.key());
  if (inserted) {
    it->second[0] = init_.uniform01();
    it->second[1] = init_.uniform01();
  }
  return it->second;
}

double QTable::get(const DecisionState& s, Action a) {
  return entry(s)[static_cast<size_t>(a)];
}

void QTable::set(const DecisionState& s, Action a, double v) {
  entry(s)[static_cast<size_t>(a)] = v;
}

double QTable::max_value(const DecisionState& s) {
  const auto& e = entry(s);
  return std::max(e[0], e[1]);
}

Action QTable::best_action(const DecisionState& s) {
  const auto& e = entry(s);
  return e[0] >= e[1] ? Action::kGrant : Action::kDefer;
}

void q_update(QTable& q, const DecisionState& s, Action a, double r, const DecisionState& s_next,
              double alpha, double discount) {
  const double target = r + discount * q.max_value(s_next);
  const double old = q.get(s, a);
  q.set(s, a, old + alpha * (target - old));
}

void q_update(QTable& q, const DecisionState& s, Action a, double r, const DecisionState& s_next,
              const AgentConfig& cfg) {
  q_update(q, s, a, r, s_next, cfg.alpha, cfg.gamma);
}

QLearningAllocator::QLearningAllocator(const AgentConfig& cfg, phy::PhyContext phy,
                                       Stream explore, Stream init, int horizon_slots)
    : cfg_(cfg),
      phy_(std::move(phy)),
      explore_(explore),
      q_(init),
      horizon_slots_(horizon_slots) {}

double QLearningAllocator::current_epsilon() const {
  if (horizon_slots_ <= 1 || cfg_.epsilon_final == cfg_.epsilon) return cfg_.epsilon;
  const double frac =
      std::min(1.0, static_cast<double>(slots_seen_) / static_cast<double>(horizon_slots_ - 1));
  return cfg_.epsilon + frac * (cfg_.epsilon_final - cfg_.epsilon);
}

void QLearningAllocator::reset_schedule(int horizon_slots) {
  horizon_slots_ = horizon_slots;
  slots_seen_ = 0;
}

void QLearningAllocator::complete(const DecisionState& s_next) {
  if (!pending_) return;
  q_update(q_, pending_->s, pending_->a, pending_->r, s_next, cfg_);
  ++updates_;
  pending_.reset();
}

void QLearningAllocator::flush(const EnvState& env) {
  if (!pending_) return;
  // No further request: bootstrap from the same request features against
  // the pool as it stands.
  DecisionState s_next = pending_->s;
  s_next.free_blocks = env.pool.free_blocks();
  s_next.cpu_bucket = env.pool.cpu_free / kCpuBucketWidth;
  s_next.power_free = env.pool.power_free;
  complete(s_next);
}

std::vector<Grant> QLearningAllocator::allocate(EnvState& env) {
  std::vector<Grant> grants;
  std::vector<SliceRequest> order = env.queue;
  std::stable_sort(order.begin(), order.end(), [](const SliceRequest& a, const SliceRequest& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.arrival_slot != b.arrival_slot) return a.arrival_slot < b.arrival_slot;
    return a.ue_id < b.ue_id;
  });
  const double eps = current_epsilon();
  for (const auto& req : order) {
    const auto bundle = request_bundle(req, env.pool, phy_);
    if (!bundle) continue;
    const DecisionState s = discretize(env.pool, req, bundle, cfg_.kblocks_cap);
    complete(s);

    Action a;
    if (explore_.bernoulli(eps)) {
      a = explore_.bernoulli(0.5) ? Action::kGrant : Action::kDefer;
    } else {
      a = q_.best_action(s);
    }
    double r = 0.0;
    if (a == Action::kGrant) {
      grants.push_back(apply_grant(env, req, *bundle));
      r = req.weight;
    }
    pending_ = Pending{s, a, r};
  }
  ++slots_seen_;
  return grants;
}

// ---------------------------------------------------------------------------
// Baselines

MyopicInstance myopic_instance(const EnvState& env, const phy::PhyContext& phy) {
  MyopicInstance inst;
  const auto& pool = env.pool;
  inst.capacity = {pool.free_blocks(), pool.cpu_free, pool.power_free};
  for (size_t i = 0; i < env.queue.size(); ++i) {
    const auto& r = env.queue[i];
    const auto opts = phy::bundle_options(r.demand_rate, r.cpu_demand,
                                          r.link_budget(phy.power_levels), phy.curve,
                                          pool.free_blocks(), pool.cpu_free, pool.power_free,
                                          phy.per_block_rate_c);
    if (opts.empty()) continue;
    knapsack::Item item;
    item.weight = r.weight;
    for (const auto& b : opts) item.options.push_back({b.num_blocks, b.cpu_levels, b.power_level});
    inst.queue_index.push_back(i);
    inst.items.push_back(std::move(item));
  }
  return inst;
}

knapsack::Selection myopic_bruteforce(const MyopicInstance& instance) {
  return knapsack::solve_bruteforce(instance.items, instance.capacity);
}

std::vector<Grant> myopic_slot(EnvState& env, const phy::PhyContext& phy) {
  const MyopicInstance inst = myopic_instance(env, phy);
  const knapsack::Selection sel = knapsack::solve(inst.items, inst.capacity);
  std::vector<SliceRequest> winners;
  std::vector<phy::Bundle> bundles;
  for (size_t k = 0; k < sel.chosen.size(); ++k) {
    const auto idx = static_cast<size_t>(sel.chosen[k]);
    const auto& need = inst.items[idx].options[static_cast<size_t>(sel.option[k])];
    winners.push_back(env.queue[inst.queue_index[idx]]);
    bundles.push_back({need.blocks, need.cpu, need.power});
  }
  std::vector<Grant> grants;
  for (size_t i = 0; i < winners.size(); ++i) {
    grants.push_back(apply_grant(env, winners[i], bundles[i]));
  }
  return grants;
}

namespace {

std::vector<Grant> greedy_pass(EnvState& env, const std::vector<SliceRequest>& order,
                               const phy::PhyContext& phy) {
  std::vector<Grant> grants;
  for (const auto& req : order) {
    if (const auto b = request_bundle(req, env.pool, phy)) {
      grants.push_back(apply_grant(env, req, *b));
    }
  }
  return grants;
}

}  // namespace

std::vector<Grant> fcfs_slot(EnvState& env, const phy::PhyContext& phy) {
  const std::vector<SliceRequest> order = env.queue;  // already in arrival order
  return greedy_pass(env, order, phy);
}

std::vector<Grant> random_slot(EnvState& env, Stream& rng, const phy::PhyContext& phy) {
  std::vector<SliceRequest> order = env.queue;
  for (size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  return greedy_pass(env, order, phy);
}

std::unique_ptr<Allocator> make_allocator(const ScenarioConfig& config, uint64_t seed) {
  switch (config.allocator) {
    case AllocatorKind::kQLearning:
      return std::make_unique<QLearningAllocator>(
          config.agent, config.phy_context(), Stream::derive(seed, "explore"),
          Stream::derive(seed, "qinit"), config.horizon_slots);
    case AllocatorKind::kMyopic:
      return std::make_unique<MyopicAllocator>(config.phy_context());
    case AllocatorKind::kFcfs:
      return std::make_unique<FcfsAllocator>(config.phy_context());
    case AllocatorKind::kRandom:
      return std::make_unique<RandomAllocator>(config.phy_context(),
                                               Stream::derive(seed, "random_alloc"));
  }
  return nullptr;
}

}  // namespace ranslice::alloc
