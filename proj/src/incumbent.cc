#include "ranslice/incumbent.h"

#include "ranslice/errors.h"

namespace ranslice::incumbent {

namespace {

// Session processes start idle; this many slots of burn-in bring them close
// to the stationary occupancy before the first slot is observed.
constexpr int kSessionBurnIn = 5 * kSessionMaxLifetime;

}  // namespace

OccupancyMask iid_mask(Stream& rng, double p_i, int n_blocks) {
  if (!(p_i >= 0.0 && p_i <= 1.0)) throw ConfigError("must be in [0, 1]", "incumbent.p_i");
  OccupancyMask mask(static_cast<size_t>(n_blocks));
  for (auto&& m : mask) m = rng.bernoulli(p_i);
  return mask;
}

double session_start_probability(double p_i) {
  if (!(p_i >= 0.0 && p_i < 1.0)) {
    throw ConfigError("must be in [0, 1) for the session pattern", "incumbent.p_i");
  }
  return p_i / ((1.0 - p_i) * kSessionMeanLifetime);
}

OccupancyMask SessionProcess::step(Stream& rng, double p_i) {
  const double q = session_start_probability(p_i);
  OccupancyMask mask(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    auto& blk = blocks_[b];
    if (blk.on) {
      if (--blk.remaining == 0) blk.on = false;
    } else if (rng.bernoulli(q)) {
      blk.on = true;
      blk.remaining =
          static_cast<int>(rng.uniform_int(kSessionMinLifetime, kSessionMaxLifetime));
      ++sessions_started_;
      lifetime_sum_ += blk.remaining;
    }
    mask[b] = blk.on;
  }
  return mask;
}

OccupancyMask session_step(Stream& rng, SessionProcess& state, double p_i) {
  return state.step(rng, p_i);
}

IncumbentSource::IncumbentSource(const IncumbentConfig& config, int n_blocks, Stream rng)
    : config_(config), n_blocks_(n_blocks), rng_(rng), sessions_(n_blocks) {
  switch (config_.pattern) {
    case IncumbentPattern::kNone:
      break;
    case IncumbentPattern::kIid:
      if (!(config_.p_i >= 0.0 && config_.p_i <= 1.0)) {
        throw ConfigError("must be in [0, 1]", "incumbent.p_i");
      }
      break;
    case IncumbentPattern::kSession:
      session_start_probability(config_.p_i);
      for (int i = 0; i < kSessionBurnIn; ++i) sessions_.step(rng_, config_.p_i);
      break;
  }
}

OccupancyMask IncumbentSource::next() {
  OccupancyMask mask;
  switch (config_.pattern) {
    case IncumbentPattern::kNone:
      mask.assign(static_cast<size_t>(n_blocks_), false);
      break;
    case IncumbentPattern::kIid:
      mask = iid_mask(rng_, config_.p_i, n_blocks_);
      break;
    case IncumbentPattern::kSession:
      mask = sessions_.step(rng_, config_.p_i);
      break;
  }
  uint64_t bits = 0;
  for (size_t b = 0; b < mask.size(); ++b) bits |= static_cast<uint64_t>(mask[b]) << (b % 64);
  fingerprint_ = fnv1a_u64(bits, fingerprint_);
  return mask;
}

}  // namespace ranslice::incumbent
