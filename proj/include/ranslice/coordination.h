#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "ranslice/config.h"

namespace ranslice::coord {

/// gNodeBs and which pairs interfere.
class Topology {
 public:
  Topology() = default;
  /// Throws ConfigError on out-of-range ids or self pairs.
  Topology(int n_gnbs, const std::vector<std::pair<int, int>>& neighbor_pairs);
  static Topology from_config(const TopologyConfig& config) {
    return Topology(config.n_gnbs, config.neighbors);
  }

  int n_gnbs() const { return n_gnbs_; }
  bool neighbors(int a, int b) const;
  const std::vector<int>& neighbors_of(int gnb) const;

 private:
  int n_gnbs_ = 1;
  std::vector<std::vector<int>> adj_{{}};
};

struct PlannedAssignment {
  int gnb_id = 0;
  std::vector<int> block_ids;
  int weight = 1;
  int64_t request_key = 0;

  friend bool operator==(const PlannedAssignment&, const PlannedAssignment&) = default;
};

/// Union of the blocks neighbours of `gnb_id` are using. `neighbor_usage`
/// holds one block mask per gNodeB. Throws std::domain_error for an
/// unknown gnb_id.
std::vector<bool> preprocess_mask(int gnb_id, const Topology& topology,
                                  const std::vector<std::vector<bool>>& neighbor_usage);

/// Drops plans that collide with a neighbouring gNodeB's plan on any block.
///
/// Plans are ranked by weight (descending), then gnb_id, then request key,
/// and admitted in that order unless they share a block with an admitted
/// plan of a neighbour. A losing plan is dropped whole. Survivors keep
/// their input order.
std::vector<PlannedAssignment> resolve_conflicts(const std::vector<PlannedAssignment>& plans,
                                                 const Topology& topology);

/// The distributed form: gNodeB `gnb_id` decides which of its own plans to
/// keep from the plan lists broadcast by everyone. Agrees with the central
/// resolver.
std::vector<PlannedAssignment> resolve_local(int gnb_id,
                                             const std::vector<PlannedAssignment>& all_plans,
                                             const Topology& topology);

}  // namespace ranslice::coord
