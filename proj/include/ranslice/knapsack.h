#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ranslice::knapsack {

// Multiple-choice 0/1 knapsack over three integer capacities (blocks, CPU
// levels, power units), as solved by the myopic allocator every slot. Each
// item is taken at most once, in one of its alternative resource shapes.

struct Need {
  int blocks = 0;
  int cpu = 0;
  int power = 0;
  friend bool operator==(const Need&, const Need&) = default;
};

struct Item {
  int weight = 0;
  std::vector<Need> options;

  Item() = default;
  Item(int w, std::vector<Need> opts) : weight(w), options(std::move(opts)) {}
  /// Single-shape item.
  Item(int w, int blocks, int cpu, int power) : weight(w), options{{blocks, cpu, power}} {}
};

struct Capacity {
  int blocks = 0;
  int cpu = 0;
  int power = 0;
};

struct Selection {
  int64_t value = 0;
  std::vector<int> chosen;  // ascending item indices
  std::vector<int> option;  // option taken, parallel to chosen
};

/// Ties between optimal selections go to the smallest decision sequence,
/// reading items in index order with "option 0 < option 1 < ... < skip".
/// With positive weights this picks the lexicographically smallest index
/// list first. Both solvers and the oracle agree on it.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b);

/// Exact DP over the full capacity lattice; single-threaded reference.
Selection solve_serial(std::span<const Item> items, Capacity cap);

/// Same recurrence with each item layer updated by an OpenMP parallel loop.
Selection solve_parallel(std::span<const Item> items, Capacity cap);

/// Picks the parallel kernel once the lattice is large enough to pay for
/// the thread fork.
Selection solve(std::span<const Item> items, Capacity cap);

inline constexpr int kMaxBruteForceItems = 20;

/// Exhaustive depth-first enumeration of every decision sequence. Throws
/// std::length_error above kMaxBruteForceItems items.
Selection solve_bruteforce(std::span<const Item> items, Capacity cap);

}  // namespace ranslice::knapsack
