#include "ranslice/coordination.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ranslice/errors.h"

namespace ranslice::coord {

Topology::Topology(int n_gnbs, const std::vector<std::pair<int, int>>& neighbor_pairs)
    : n_gnbs_(n_gnbs) {
  if (n_gnbs < 1) throw ConfigError("must be >= 1", "topology.n_gnbs");
  adj_.assign(static_cast<size_t>(n_gnbs), {});
  for (const auto& [a, b] : neighbor_pairs) {
    if (a < 0 || b < 0 || a >= n_gnbs || b >= n_gnbs) {
      throw ConfigError("pair references unknown gNodeB", "topology.neighbors");
    }
    if (a == b) throw ConfigError("self pair", "topology.neighbors");
    if (!neighbors(a, b)) {
      adj_[static_cast<size_t>(a)].push_back(b);
      adj_[static_cast<size_t>(b)].push_back(a);
    }
  }
  for (auto& v : adj_) std::sort(v.begin(), v.end());
}

bool Topology::neighbors(int a, int b) const {
  if (a < 0 || a >= n_gnbs_) return false;
  const auto& v = adj_[static_cast<size_t>(a)];
  return std::find(v.begin(), v.end(), b) != v.end();
}

const std::vector<int>& Topology::neighbors_of(int gnb) const {
  if (gnb < 0 || gnb >= n_gnbs_) throw std::domain_error("unknown gNodeB " + std::to_string(gnb));
  return adj_[static_cast<size_t>(gnb)];
}

std::vector<bool> preprocess_mask(int gnb_id, const Topology& topology,
                                  const std::vector<std::vector<bool>>& neighbor_usage) {
  const auto& nbrs = topology.neighbors_of(gnb_id);
  if (static_cast<int>(neighbor_usage.size()) < topology.n_gnbs()) {
    throw std::invalid_argument("usage masks must cover every gNodeB");
  }
  std::vector<bool> mask(neighbor_usage[static_cast<size_t>(gnb_id)].size(), false);
  for (int n : nbrs) {
    const auto& use = neighbor_usage[static_cast<size_t>(n)];
    for (size_t b = 0; b < mask.size() && b < use.size(); ++b) {
      if (use[b]) mask[b] = true;
    }
  }
  return mask;
}

namespace {

// Indices into `plans` of the admitted plans, in input order.
std::vector<size_t> admitted(const std::vector<PlannedAssignment>& plans,
                             const Topology& topology) {
  std::vector<size_t> order(plans.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    const auto& a = plans[x];
    const auto& b = plans[y];
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.gnb_id != b.gnb_id) return a.gnb_id < b.gnb_id;
    return a.request_key < b.request_key;
  });

  // block -> gNodeBs holding an admitted plan on it
  std::map<int, std::vector<int>> claims;
  std::vector<bool> keep(plans.size(), false);
  for (size_t idx : order) {
    const auto& p = plans[idx];
    bool clash = false;
    for (int b : p.block_ids) {
      auto it = claims.find(b);
      if (it == claims.end()) continue;
      for (int g : it->second) {
        if (topology.neighbors(p.gnb_id, g)) {
          clash = true;
          break;
        }
      }
      if (clash) break;
    }
    if (clash) continue;
    keep[idx] = true;
    for (int b : p.block_ids) claims[b].push_back(p.gnb_id);
  }
  std::vector<size_t> out;
  for (size_t i = 0; i < plans.size(); ++i) {
    if (keep[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<PlannedAssignment> resolve_conflicts(const std::vector<PlannedAssignment>& plans,
                                                 const Topology& topology) {
  std::vector<PlannedAssignment> out;
  for (size_t i : admitted(plans, topology)) out.push_back(plans[i]);
  return out;
}

std::vector<PlannedAssignment> resolve_local(int gnb_id,
                                             const std::vector<PlannedAssignment>& all_plans,
                                             const Topology& topology) {
  std::vector<PlannedAssignment> out;
  for (size_t i : admitted(all_plans, topology)) {
    if (all_plans[i].gnb_id == gnb_id) out.push_back(all_plans[i]);
  }
  return out;
}

}  // namespace ranslice::coord
