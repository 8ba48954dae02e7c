#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ranslice/resource_pool.h"

namespace ranslice::phy {

/// Highest code rate of the NR peak-rate formula.
inline constexpr double kRMax = 948.0 / 1024.0;

/// Per-block rate c for one single-layer QPSK carrier, 60 kHz SCS, 10 MHz.
inline constexpr double kDefaultPerBlockRate = 12.59e6;

/// One aggregated component carrier of the NR peak-rate formula.
struct CarrierConfig {
  int v_layers = 1;
  int q_m = 2;
  double f_scale = 1.0;  // one of 1, 0.8, 0.75, 0.4
  int mu = 0;
  int n_prb = 1;
  double overhead = 0.0;  // [0, 1)
};

/// Average OFDM symbol duration for normal cyclic prefix, seconds.
double symbol_duration(int mu);

/// Approximate NR data rate (bits/s) summed over aggregated carriers.
/// Throws ConfigError on an invalid carrier.
double nr_max_rate(std::span<const CarrierConfig> carriers);

/// Rate delivered by k blocks of per-block rate c at a given bit error rate.
inline double effective_rate(double per_block_rate_c, int k_blocks, double ber) {
  return per_block_rate_c * k_blocks * (1.0 - ber);
}

/// Piecewise-linear BER as a function of SNR (dB), clamped at both ends.
class BerCurve {
 public:
  using Point = std::pair<double, double>;  // (snr_db, ber)

  BerCurve() = default;
  /// Throws ConfigError unless points are strictly increasing in SNR, BER is
  /// within [0, 0.5] and non-increasing.
  explicit BerCurve(std::vector<Point> points);

  /// (-10 dB, 0.5) to (-1 dB, 0): zero BER at and above -1 dB.
  static BerCurve default_curve();

  /// Two-column CSV (snr_db, ber); a non-numeric first line is taken as a header.
  static BerCurve from_csv(std::istream& in);
  static BerCurve from_csv_file(const std::string& path);

  double at(double snr_db) const;

  const std::vector<Point>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<Point> points_;
};

/// Throws ConfigError on an empty curve.
double ber_at_snr(const BerCurve& curve, double snr_db);

struct LinkBudget {
  double max_snr_db = 3.0;
  int power_levels = 5;
};

/// Received SNR (dB) at a discrete transmit level. Level 0 carries no
/// signal and yields nullopt. SNR scales with the transmitted power
/// fraction: max_snr_db + 10 log10(level / power_levels).
/// Throws std::domain_error when level is outside [0, power_levels].
std::optional<double> snr_at_power(const LinkBudget& budget, int level);

/// Resource bundle granted to one request. All-zero means no allocation.
struct Bundle {
  int num_blocks = 0;
  int cpu_levels = 0;
  int power_level = 0;

  bool empty() const { return num_blocks == 0 && cpu_levels == 0 && power_level == 0; }
  friend bool operator==(const Bundle&, const Bundle&) = default;
};

/// Everything the allocators need to turn a request into a bundle.
struct PhyContext {
  BerCurve curve = BerCurve::default_curve();
  int power_levels = 5;
  double per_block_rate_c = kDefaultPerBlockRate;
};

/// Cheapest feasible bundle for a request against free counts.
///
/// Candidates are ordered by block count first and power level second; the
/// first (K, level) with effective_rate >= demand that fits the free blocks
/// and power wins. CPU is granted at exactly the demanded level.
std::optional<Bundle> min_bundle(double demand_rate, int cpu_demand, const LinkBudget& budget,
                                 const BerCurve& curve, int free_blocks, int free_cpu,
                                 int free_power, double per_block_rate_c);

/// Every bundle that is not dominated in (blocks, power): for each block
/// count, the lowest power level meeting the demand, kept only when it is
/// lower than with fewer blocks. Ascending in blocks, so the first entry is
/// min_bundle's answer. Empty when nothing fits.
std::vector<Bundle> bundle_options(double demand_rate, int cpu_demand, const LinkBudget& budget,
                                   const BerCurve& curve, int free_blocks, int free_cpu,
                                   int free_power, double per_block_rate_c);

inline std::optional<Bundle> min_bundle(double demand_rate, int cpu_demand,
                                        const LinkBudget& budget, const BerCurve& curve,
                                        const ResourcePool& pool, double per_block_rate_c) {
  return min_bundle(demand_rate, cpu_demand, budget, curve, pool.free_blocks(), pool.cpu_free,
                    pool.power_free, per_block_rate_c);
}

}  // namespace ranslice::phy
