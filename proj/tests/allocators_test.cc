#include "ranslice/allocators.h"

#include <vector>

#include "gtest/gtest.h"

namespace ranslice::alloc {
namespace {

constexpr double kC = phy::kDefaultPerBlockRate;

SliceRequest Req(int ue, int64_t id, int weight, double k_rate, int cpu, double max_snr = 3.0,
                 int64_t arrival = 0) {
  SliceRequest r;
  r.ue_id = ue;
  r.req_id = id;
  r.weight = weight;
  r.demand_rate = k_rate * kC;
  r.cpu_demand = cpu;
  r.deadline = 20;
  r.lifetime = 5;
  r.arrival_slot = arrival;
  r.max_snr_db = max_snr;
  return r;
}

EnvState Env() {
  EnvState e = EnvState::make(ScenarioConfig{});
  e.check_invariants = true;
  return e;
}

void Enqueue(EnvState& e, const SliceRequest& r) {
  e.queue.push_back(r);
  ++e.counters.arrived;
}

int64_t Utility(const std::vector<Grant>& gs) {
  int64_t u = 0;
  for (const auto& g : gs) u += g.request.weight;
  return u;
}

TEST(Discretize, Examples) {
  const ResourcePool full = ResourcePool::full(11, 50, 10);
  const auto r5 = Req(0, 0, 5, 2, 1);
  EXPECT_EQ(discretize(full, r5, phy::Bundle{2, 1, 2}), (DecisionState{11, 10, 10, 5, 2}));

  ResourcePool empty = ResourcePool::full(11, 0, 0);
  empty.block_free.assign(11, false);
  EXPECT_EQ(discretize(empty, Req(0, 0, 1, 1, 1), phy::Bundle{1, 1, 1}),
            (DecisionState{0, 0, 0, 1, 1}));

  ResourcePool p = ResourcePool::full(11, 50, 10);
  p.cpu_free = 27;
  EXPECT_EQ(discretize(p, r5, phy::Bundle{1, 1, 1}).cpu_bucket, 5);
}

TEST(Discretize, CapAndInfeasible) {
  const ResourcePool full = ResourcePool::full(11, 50, 10);
  EXPECT_EQ(discretize(full, Req(0, 0, 1, 1, 1), phy::Bundle{7, 1, 1}).req_kblocks, 3);
  EXPECT_EQ(discretize(full, Req(0, 0, 1, 1, 1), std::nullopt).req_kblocks, kInfeasibleKBlocks);
}

TEST(DecisionState, KeysDistinct) {
  DecisionState a{11, 10, 10, 5, 2};
  DecisionState b = a;
  b.req_kblocks = 3;
  EXPECT_NE(a.key(), b.key());
  b = a;
  b.power_free = 9;
  EXPECT_NE(a.key(), b.key());
}

TEST(QUpdate, Arithmetic) {
  QTable q(Stream(1));
  const DecisionState s{1, 1, 1, 1, 1}, sn{2, 2, 2, 2, 2};
  q.set(s, Action::kGrant, 0.0);
  q.set(sn, Action::kGrant, 10.0);
  q.set(sn, Action::kDefer, 3.0);
  q_update(q, s, Action::kGrant, 5.0, sn, AgentConfig{});
  EXPECT_NEAR(q.get(s, Action::kGrant), 1.45, 1e-12);
}

TEST(QUpdate, FixedPoint) {
  QTable q(Stream(1));
  const DecisionState s{1, 1, 1, 1, 1}, sn{2, 2, 2, 2, 2};
  q.set(sn, Action::kGrant, 4.0);
  q.set(sn, Action::kDefer, 4.0);
  const double fixed = 1.0 + 0.95 * 4.0;
  q.set(s, Action::kDefer, fixed);
  for (double alpha : {0.1, 0.5, 1.0}) {
    q_update(q, s, Action::kDefer, 1.0, sn, alpha, 0.95);
    EXPECT_DOUBLE_EQ(q.get(s, Action::kDefer), fixed);
  }
}

TEST(QUpdate, Degenerate) {
  QTable q(Stream(1));
  const DecisionState s{1, 1, 1, 1, 1}, sn{2, 2, 2, 2, 2};
  q.set(s, Action::kGrant, 123.0);
  q.set(sn, Action::kGrant, 77.0);
  AgentConfig cfg;
  cfg.alpha = 1.0;
  cfg.gamma = 0.0;
  q_update(q, s, Action::kGrant, 4.0, sn, cfg);
  EXPECT_EQ(q.get(s, Action::kGrant), 4.0);
}

TEST(QUpdate, OtherEntriesUntouchedAndContraction) {
  QTable q(Stream(3));
  const DecisionState s{1, 1, 1, 1, 1}, sn{2, 2, 2, 2, 2}, other{3, 3, 3, 3, 3};
  const double other_g = q.get(other, Action::kGrant);
  const double other_d = q.get(other, Action::kDefer);
  const double s_defer = q.get(s, Action::kDefer);
  q.set(s, Action::kGrant, 0.0);
  q.set(sn, Action::kGrant, 2.0);
  q.set(sn, Action::kDefer, 1.0);
  const double target = 3.0 + 0.95 * 2.0;
  double prev_gap = target;
  for (int i = 0; i < 50; ++i) {
    q_update(q, s, Action::kGrant, 3.0, sn, AgentConfig{});
    const double gap = target - q.get(s, Action::kGrant);
    EXPECT_NEAR(gap, prev_gap * 0.9, 1e-9);
    prev_gap = gap;
  }
  EXPECT_EQ(q.get(other, Action::kGrant), other_g);
  EXPECT_EQ(q.get(other, Action::kDefer), other_d);
  EXPECT_EQ(q.get(s, Action::kDefer), s_defer);
}

TEST(QTable, LazyInitIsSeededAndBounded) {
  QTable a(Stream(9)), b(Stream(9));
  for (int i = 0; i < 100; ++i) {
    const DecisionState s{i % 12, i % 11, i % 10, 1 + i % 5, 1 + i % 3};
    const double g = a.get(s, Action::kGrant);
    EXPECT_EQ(g, b.get(s, Action::kGrant));
    EXPECT_GE(g, 0.0);
    EXPECT_LT(g, 1.0);
  }
  EXPECT_FALSE(a.contains(DecisionState{99, 0, 0, 0, 0}));
}

TEST(QTable, TiesGoToGrant) {
  QTable q(Stream(1));
  const DecisionState s{1, 1, 1, 1, 1};
  q.set(s, Action::kGrant, 0.5);
  q.set(s, Action::kDefer, 0.5);
  EXPECT_EQ(q.best_action(s), Action::kGrant);
  q.set(s, Action::kDefer, 0.6);
  EXPECT_EQ(q.best_action(s), Action::kDefer);
}

AgentConfig Greedy() {
  AgentConfig cfg;
  cfg.epsilon = 0.0;
  cfg.epsilon_final = 0.0;
  return cfg;
}

TEST(QLearning, GreedySingleRequestGranted) {
  EnvState env = Env();
  const auto r = Req(0, 0, 4, 1, 5);
  Enqueue(env, r);
  QLearningAllocator agent(Greedy(), phy::PhyContext{}, Stream(1), Stream(2), 1000);
  const auto bundle = request_bundle(r, env.pool, phy::PhyContext{});
  ASSERT_TRUE(bundle);
  const DecisionState s = discretize(env.pool, r, bundle);
  agent.table().set(s, Action::kGrant, 10.0);
  agent.table().set(s, Action::kDefer, 0.0);
  const auto grants = agent.allocate(env);
  ASSERT_EQ(grants.size(), 1u);
  EXPECT_EQ(env.cum_utility, 4);
  EXPECT_TRUE(env.queue.empty());
}

TEST(QLearning, GreedyDeferKeepsRequest) {
  EnvState env = Env();
  const auto r = Req(0, 0, 4, 1, 5);
  Enqueue(env, r);
  QLearningAllocator agent(Greedy(), phy::PhyContext{}, Stream(1), Stream(2), 1000);
  const DecisionState s = discretize(env.pool, r, request_bundle(r, env.pool, phy::PhyContext{}));
  agent.table().set(s, Action::kGrant, 0.0);
  agent.table().set(s, Action::kDefer, 1.0);
  EXPECT_TRUE(agent.allocate(env).empty());
  EXPECT_EQ(env.queue.size(), 1u);
}

TEST(QLearning, EmptyQueueNoUpdates) {
  EnvState env = Env();
  QLearningAllocator agent(AgentConfig{}, phy::PhyContext{}, Stream(1), Stream(2), 1000);
  EXPECT_TRUE(agent.allocate(env).empty());
  agent.flush(env);
  EXPECT_EQ(agent.updates(), 0);
  EXPECT_EQ(agent.table().size(), 0u);
}

TEST(QLearning, InfeasibleSkippedWithoutUpdate) {
  EnvState env = Env();
  Enqueue(env, Req(0, 0, 5, 1, 60));  // CPU never fits
  QLearningAllocator agent(AgentConfig{}, phy::PhyContext{}, Stream(1), Stream(2), 1000);
  agent.allocate(env);
  agent.flush(env);
  EXPECT_EQ(agent.updates(), 0);
  EXPECT_EQ(agent.table().size(), 0u);
}

// Each decision is completed by the next one; the last waits for flush.
TEST(QLearning, OneUpdatePerDecision) {
  EnvState env = Env();
  for (int i = 0; i < 3; ++i) Enqueue(env, Req(i, i, 1 + i, 1, 2));
  QLearningAllocator agent(AgentConfig{}, phy::PhyContext{}, Stream(1), Stream(2), 1000);
  agent.allocate(env);
  EXPECT_EQ(agent.updates(), 2);
  agent.flush(env);
  EXPECT_EQ(agent.updates(), 3);
}

TEST(QLearning, DecisionOrderByWeight) {
  EnvState env = Env();
  env.pool.power_free = env.pool.power_capacity = 2;  // room for one grant
  Enqueue(env, Req(0, 0, 1, 1, 2, 3.0, 0));
  Enqueue(env, Req(1, 1, 5, 1, 2, 3.0, 1));
  QLearningAllocator agent(Greedy(), phy::PhyContext{}, Stream(1), Stream(2), 1000);
  // Every state prefers grant.
  for (int w = 1; w <= 5; ++w) {
    agent.table().set(DecisionState{11, 10, 2, w, 1}, Action::kGrant, 5.0);
    agent.table().set(DecisionState{11, 10, 2, w, 1}, Action::kDefer, 0.0);
  }
  const auto grants = agent.allocate(env);
  ASSERT_EQ(grants.size(), 1u);
  EXPECT_EQ(grants[0].request.weight, 5);
}

TEST(QLearning, EpsilonDecaysLinearly) {
  AgentConfig cfg;
  cfg.epsilon = 0.2;
  cfg.epsilon_final = 0.0;
  QLearningAllocator agent(cfg, phy::PhyContext{}, Stream(1), Stream(2), 11);
  EnvState env = Env();
  EXPECT_DOUBLE_EQ(agent.current_epsilon(), 0.2);
  for (int i = 0; i < 5; ++i) agent.allocate(env);
  EXPECT_NEAR(agent.current_epsilon(), 0.1, 1e-12);
  for (int i = 0; i < 10; ++i) agent.allocate(env);
  EXPECT_DOUBLE_EQ(agent.current_epsilon(), 0.0);
}

TEST(Myopic, WorkedExample) {
  const phy::PhyContext phy;
  EnvState env = Env();
  // Bundles {6,10,4}, {4,5,2}, {4,5,2} against the full 11/50/10 pool.
  Enqueue(env, Req(0, 0, 5, 5.5, 10, -1.5));
  Enqueue(env, Req(1, 1, 3, 3.5, 5, 2.0));
  Enqueue(env, Req(2, 2, 3, 3.5, 5, 2.0));
  const auto inst = myopic_instance(env, phy);
  ASSERT_EQ(inst.items.size(), 3u);
  EXPECT_EQ(inst.items[0].options[0], (knapsack::Need{6, 10, 4}));
  EXPECT_EQ(inst.items[1].options[0], (knapsack::Need{4, 5, 2}));
  const auto grants = myopic_slot(env, phy);
  ASSERT_EQ(grants.size(), 2u);
  EXPECT_EQ(grants[0].request.req_id, 0);
  EXPECT_EQ(grants[1].request.req_id, 1);
  EXPECT_EQ(grants[0].bundle, (phy::Bundle{6, 10, 4}));
  EXPECT_EQ(env.cum_utility, 8);
}

TEST(Myopic, SingleAndInfeasible) {
  const phy::PhyContext phy;
  EnvState env = Env();
  Enqueue(env, Req(0, 0, 2, 1, 5));
  EXPECT_EQ(myopic_slot(env, phy).size(), 1u);

  EnvState none = Env();
  Enqueue(none, Req(0, 0, 2, 1, 60));
  Enqueue(none, Req(1, 1, 2, 12, 1));
  EXPECT_TRUE(myopic_slot(none, phy).empty());
}

// With power short, trading blocks for power lets both requests in.
TEST(Myopic, UsesAlternativeBundles) {
  const phy::PhyContext phy;
  EnvState env = Env();
  env.pool.power_free = env.pool.power_capacity = 3;
  Enqueue(env, Req(0, 0, 2, 1, 5, 3.0));
  Enqueue(env, Req(1, 1, 2, 1, 5, 3.0));
  const auto inst = myopic_instance(env, phy);
  ASSERT_EQ(inst.items[0].options.size(), 2u);
  EXPECT_EQ(inst.items[0].options[1], (knapsack::Need{2, 5, 1}));
  const auto grants = myopic_slot(env, phy);
  ASSERT_EQ(grants.size(), 2u);
  EXPECT_EQ(grants[0].bundle, (phy::Bundle{1, 5, 2}));
  EXPECT_EQ(grants[1].bundle, (phy::Bundle{2, 5, 1}));
}

TEST(Fcfs, SkipsInfeasibleOlderRequest) {
  const phy::PhyContext phy;
  EnvState env = Env();
  Enqueue(env, Req(0, 0, 5, 1, 60, 3.0, 0));
  Enqueue(env, Req(1, 1, 1, 1, 5, 3.0, 1));
  const auto grants = fcfs_slot(env, phy);
  ASSERT_EQ(grants.size(), 1u);
  EXPECT_EQ(grants[0].request.req_id, 1);
}

TEST(Fcfs, AllFitInArrivalOrder) {
  const phy::PhyContext phy;
  EnvState env = Env();
  for (int i = 0; i < 3; ++i) Enqueue(env, Req(i, i, 5 - i, 1, 5, 3.0, i));
  const auto grants = fcfs_slot(env, phy);
  ASSERT_EQ(grants.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(grants[static_cast<size_t>(i)].request.req_id, i);
  EnvState empty = Env();
  EXPECT_TRUE(fcfs_slot(empty, phy).empty());
}

TEST(Random, SingleAndEmpty) {
  const phy::PhyContext phy;
  Stream rng(3);
  for (int i = 0; i < 50; ++i) {
    EnvState env = Env();
    Enqueue(env, Req(0, 0, 1, 1, 5));
    EXPECT_EQ(random_slot(env, rng, phy).size(), 1u);
  }
  EnvState empty = Env();
  EXPECT_TRUE(random_slot(empty, rng, phy).empty());
}

TEST(Random, FairBetweenTwins) {
  const phy::PhyContext phy;
  Stream rng(4);
  int first = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    EnvState env = Env();
    env.pool.power_free = env.pool.power_capacity = 2;
    Enqueue(env, Req(0, 0, 3, 1, 5));
    Enqueue(env, Req(1, 1, 3, 1, 5));
    const auto g = random_slot(env, rng, phy);
    ASSERT_EQ(g.size(), 1u);
    if (g[0].request.req_id == 0) ++first;
  }
  EXPECT_NEAR(static_cast<double>(first) / trials, 0.5, 0.05);
}

EnvState RandomSnapshot(Stream& rng, int n_req) {
  EnvState env = Env();
  const int held_blocks = static_cast<int>(rng.uniform_int(0, 6));
  for (int b = 0; b < held_blocks; ++b) {
    env.pool.block_free[static_cast<size_t>(b)] = false;
    env.pool.block_masked[static_cast<size_t>(b)] = true;
  }
  env.pool.cpu_free = env.pool.cpu_capacity = static_cast<int>(rng.uniform_int(5, 50));
  env.pool.power_free = env.pool.power_capacity = static_cast<int>(rng.uniform_int(1, 10));
  for (int i = 0; i < n_req; ++i) {
    Enqueue(env, Req(i, i, static_cast<int>(rng.uniform_int(1, 5)),
                     static_cast<double>(rng.uniform_int(1, 3)),
                     static_cast<int>(rng.uniform_int(1, 10)), rng.uniform_real(1.5, 3.0)));
  }
  return env;
}

TEST(Myopic, MatchesBruteForceOnSnapshots) {
  const phy::PhyContext phy;
  Stream rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    EnvState env = RandomSnapshot(rng, static_cast<int>(rng.uniform_int(0, 12)));
    const auto inst = myopic_instance(env, phy);
    const auto bf = myopic_bruteforce(inst);
    const auto queue = env.queue;
    const auto grants = myopic_slot(env, phy);
    ASSERT_EQ(Utility(grants), bf.value) << "trial " << trial;
    ASSERT_EQ(grants.size(), bf.chosen.size());
    for (size_t k = 0; k < grants.size(); ++k) {
      const auto idx = static_cast<size_t>(bf.chosen[k]);
      EXPECT_EQ(grants[k].request.req_id, queue[inst.queue_index[idx]].req_id);
      const auto& need = inst.items[idx].options[static_cast<size_t>(bf.option[k])];
      EXPECT_EQ(grants[k].bundle, (phy::Bundle{need.blocks, need.cpu, need.power}));
    }
  }
}

TEST(Myopic, DominatesGreedyPolicies) {
  const phy::PhyContext phy;
  Stream rng(78), shuffle(79);
  for (int trial = 0; trial < 500; ++trial) {
    const EnvState base = RandomSnapshot(rng, static_cast<int>(rng.uniform_int(0, 10)));
    EnvState a = base, b = base, c = base;
    const int64_t m = Utility(myopic_slot(a, phy));
    EXPECT_GE(m, Utility(fcfs_slot(b, phy)));
    EXPECT_GE(m, Utility(random_slot(c, shuffle, phy)));
  }
}

TEST(MakeAllocator, KindsAndStreams) {
  ScenarioConfig cfg;
  for (auto k : {AllocatorKind::kQLearning, AllocatorKind::kMyopic, AllocatorKind::kFcfs,
                 AllocatorKind::kRandom}) {
    cfg.allocator = k;
    EXPECT_EQ(make_allocator(cfg, 1)->kind(), k);
  }
}

}  // namespace
}  // namespace ranslice::alloc
