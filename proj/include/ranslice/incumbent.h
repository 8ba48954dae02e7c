#pragma once

#include <cstdint>
#include <vector>

#include "ranslice/config.h"
#include "ranslice/rng.h"

namespace ranslice::incumbent {

using OccupancyMask = std::vector<bool>;

inline constexpr int kSessionMinLifetime = 10;
inline constexpr int kSessionMaxLifetime = 50;
inline constexpr double kSessionMeanLifetime =
    (kSessionMinLifetime + kSessionMaxLifetime) / 2.0;

/// Each block occupied independently with probability p_i.
/// Throws ConfigError unless 0 <= p_i <= 1.
OccupancyMask iid_mask(Stream& rng, double p_i, int n_blocks);

/// Per-slot probability that an idle block starts a session, chosen so the
/// stationary occupied fraction is p_i: E[L] / (E[L] + 1/q) = p_i.
/// Throws ConfigError unless 0 <= p_i < 1.
double session_start_probability(double p_i);

struct SessionBlock {
  bool on = false;
  int remaining = 0;
};

/// On/off renewal occupancy, independent per block.
class SessionProcess {
 public:
  explicit SessionProcess(int n_blocks) : blocks_(static_cast<size_t>(n_blocks)) {}

  /// One slot: running sessions count down and end at zero (the block then
  /// stays idle for that slot); idle blocks start a session with the
  /// calibrated probability and a lifetime drawn from U{10..50}.
  OccupancyMask step(Stream& rng, double p_i);

  const std::vector<SessionBlock>& blocks() const { return blocks_; }
  int64_t sessions_started() const { return sessions_started_; }
  int64_t lifetime_sum() const { return lifetime_sum_; }

 private:
  std::vector<SessionBlock> blocks_;
  int64_t sessions_started_ = 0;
  int64_t lifetime_sum_ = 0;
};

OccupancyMask session_step(Stream& rng, SessionProcess& state, double p_i);

/// The configured incumbent for one scenario: pattern, probability and the
/// stream it draws from.
class IncumbentSource {
 public:
  IncumbentSource(const IncumbentConfig& config, int n_blocks, Stream rng);

  /// Mask for the next slot (all false for the `none` pattern).
  OccupancyMask next();

  uint64_t fingerprint() const { return fingerprint_; }

 private:
  IncumbentConfig config_;
  int n_blocks_;
  Stream rng_;
  SessionProcess sessions_;
  uint64_t fingerprint_ = kFnvOffset;
};

}  // namespace ranslice::incumbent
