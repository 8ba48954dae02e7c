#include "ranslice/knapsack.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranslice::knapsack {

namespace {

// Below this many cells per layer the fork/join costs more than the loop.
constexpr int64_t kParallelCellThreshold = 16384;

struct Lattice {
  int b, c, p;  // capacities
  int64_t cells() const { return int64_t{b + 1} * (c + 1) * (p + 1); }
  int64_t index(int bb, int cc, int pp) const { return (int64_t{bb} * (c + 1) + cc) * (p + 1) + pp; }
};

bool fits(const Need& d, int bb, int cc, int pp) {
  return d.blocks >= 0 && d.cpu >= 0 && d.power >= 0 && d.blocks <= bb && d.cpu <= cc &&
         d.power <= pp;
}

// value[i] holds the best value achievable with items i..n-1 for every
// capacity point. Filling from the last item backwards lets the forward
// reconstruction take the earliest decision whenever that stays optimal.
template <bool kParallel>
std::vector<std::vector<int64_t>> fill(std::span<const Item> items, const Lattice& lat) {
  const auto n = items.size();
  const int64_t cells = lat.cells();
  std::vector<std::vector<int64_t>> value(n + 1, std::vector<int64_t>(static_cast<size_t>(cells), 0));
  for (size_t i = n; i-- > 0;) {
    const Item& it = items[i];
    const auto& next = value[i + 1];
    auto& cur = value[i];
    // Each cell reads only layer i+1, so (bb, cc) rows are independent.
#pragma omp parallel for collapse(2) schedule(static) if (kParallel && cells >= kParallelCellThreshold)
    for (int bb = 0; bb <= lat.b; ++bb) {
      for (int cc = 0; cc <= lat.c; ++cc) {
        const auto row = static_cast<size_t>(lat.index(bb, cc, 0));
        for (int pp = 0; pp <= lat.p; ++pp) {
          int64_t best = next[row + static_cast<size_t>(pp)];
          for (const Need& d : it.options) {
            if (!fits(d, bb, cc, pp)) continue;
            const int64_t take = it.weight + next[static_cast<size_t>(
                                                 lat.index(bb - d.blocks, cc - d.cpu, pp - d.power))];
            best = std::max(best, take);
          }
          cur[row + static_cast<size_t>(pp)] = best;
        }
      }
    }
  }
  return value;
}

Selection reconstruct(std::span<const Item> items, const Lattice& lat,
                      const std::vector<std::vector<int64_t>>& value) {
  Selection sel;
  int bb = lat.b, cc = lat.c, pp = lat.p;
  sel.value = value[0][static_cast<size_t>(lat.index(bb, cc, pp))];
  int64_t remaining = sel.value;
  for (size_t i = 0; i < items.size() && remaining > 0; ++i) {
    const Item& it = items[i];
    for (size_t o = 0; o < it.options.size(); ++o) {
      const Need& d = it.options[o];
      if (!fits(d, bb, cc, pp)) continue;
      const int64_t rest =
          value[i + 1][static_cast<size_t>(lat.index(bb - d.blocks, cc - d.cpu, pp - d.power))];
      if (it.weight + rest == remaining) {
        sel.chosen.push_back(static_cast<int>(i));
        sel.option.push_back(static_cast<int>(o));
        remaining -= it.weight;
        bb -= d.blocks;
        cc -= d.cpu;
        pp -= d.power;
        break;
      }
    }
  }
  return sel;
}

template <bool kParallel>
Selection solve_impl(std::span<const Item> items, Capacity cap) {
  const Lattice lat{std::max(cap.blocks, 0), std::max(cap.cpu, 0), std::max(cap.power, 0)};
  if (items.empty()) return {};
  return reconstruct(items, lat, fill<kParallel>(items, lat));
}

}  // namespace

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Selection solve_serial(std::span<const Item> items, Capacity cap) {
  return solve_impl<false>(items, cap);
}

Selection solve_parallel(std::span<const Item> items, Capacity cap) {
  return solve_impl<true>(items, cap);
}

Selection solve(std::span<const Item> items, Capacity cap) {
  const Lattice lat{std::max(cap.blocks, 0), std::max(cap.cpu, 0), std::max(cap.power, 0)};
  if (lat.cells() >= kParallelCellThreshold) return solve_parallel(items, cap);
  return solve_serial(items, cap);
}

namespace {

struct Search {
  std::span<const Item> items;
  Selection best;
  Selection cur;
  bool found = false;

  // Decisions for item i are tried in tie-break order, so the first
  // selection reaching a value is the preferred one among equals.
  void visit(size_t i, int bb, int cc, int pp) {
    if (i == items.size()) {
      if (!found || cur.value > best.value) {
        best = cur;
        found = true;
      }
      return;
    }
    const Item& it = items[i];
    for (size_t o = 0; o < it.options.size(); ++o) {
      const Need& d = it.options[o];
      if (!fits(d, bb, cc, pp)) continue;
      cur.value += it.weight;
      cur.chosen.push_back(static_cast<int>(i));
      cur.option.push_back(static_cast<int>(o));
      visit(i + 1, bb - d.blocks, cc - d.cpu, pp - d.power);
      cur.value -= it.weight;
      cur.chosen.pop_back();
      cur.option.pop_back();
    }
    visit(i + 1, bb, cc, pp);
  }
};

}  // namespace

Selection solve_bruteforce(std::span<const Item> items, Capacity cap) {
  if (items.size() > static_cast<size_t>(kMaxBruteForceItems)) {
    throw std::length_error("brute force limited to " + std::to_string(kMaxBruteForceItems) +
                            " items");
  }
  Search s{items, {}, {}, false};
  s.visit(0, cap.blocks, cap.cpu, cap.power);
  return s.best;
}

}  // namespace ranslice::knapsack
