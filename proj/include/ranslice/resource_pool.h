#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ranslice {

/// Free resources at one gNodeB.
///
/// A block is free when it is neither held by a grant nor masked by an
/// incumbent (or a neighbouring gNodeB) this slot. The masked set is kept
/// alongside so conservation can be checked block by block.
struct ResourcePool {
  std::vector<bool> block_free;
  std::vector<bool> block_masked;
  int cpu_free = 0;
  int power_free = 0;

  int cpu_capacity = 0;
  int power_capacity = 0;

  static ResourcePool full(int n_blocks, int cpu_levels, int power_budget) {
    ResourcePool p;
    p.block_free.assign(static_cast<size_t>(n_blocks), true);
    p.block_masked.assign(static_cast<size_t>(n_blocks), false);
    p.cpu_free = p.cpu_capacity = cpu_levels;
    p.power_free = p.power_capacity = power_budget;
    return p;
  }

  int n_blocks() const { return static_cast<int>(block_free.size()); }
  int free_blocks() const {
    return static_cast<int>(std::count(block_free.begin(), block_free.end(), true));
  }
  int masked_blocks() const {
    return static_cast<int>(std::count(block_masked.begin(), block_masked.end(), true));
  }
};

}  // namespace ranslice
