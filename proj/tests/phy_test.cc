#include "ranslice/phy.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "ranslice/errors.h"
#include "ranslice/resource_pool.h"
#include "ranslice/rng.h"

namespace ranslice::phy {
namespace {

constexpr double kC = kDefaultPerBlockRate;

CarrierConfig ReferenceCarrier() { return {1, 2, 1.0, 2, 11, 0.08}; }

TEST(NrMaxRate, ReferenceCarrier) {
  const std::vector<CarrierConfig> cc{ReferenceCarrier()};
  const double r = nr_max_rate(cc);
  EXPECT_NEAR(r, 12.59e6, 12.59e6 * 0.005);
}

TEST(NrMaxRate, EmptyIsZero) { EXPECT_EQ(nr_max_rate({}), 0.0); }

TEST(NrMaxRate, TwoCarriersDouble) {
  const std::vector<CarrierConfig> one{ReferenceCarrier()};
  const std::vector<CarrierConfig> two{ReferenceCarrier(), ReferenceCarrier()};
  EXPECT_DOUBLE_EQ(nr_max_rate(two), 2 * nr_max_rate(one));
}

TEST(NrMaxRate, BadScaleRejected) {
  CarrierConfig c = ReferenceCarrier();
  c.f_scale = 0.9;
  const std::vector<CarrierConfig> cc{c};
  EXPECT_THROW(nr_max_rate(cc), ConfigError);
}

TEST(NrMaxRate, MonotoneInLayersModulationAndPrbs) {
  const double base = nr_max_rate(std::vector<CarrierConfig>{ReferenceCarrier()});
  CarrierConfig c = ReferenceCarrier();
  c.v_layers = 2;
  EXPECT_GE(nr_max_rate(std::vector<CarrierConfig>{c}), base);
  c = ReferenceCarrier();
  c.q_m = 4;
  EXPECT_GE(nr_max_rate(std::vector<CarrierConfig>{c}), base);
  c = ReferenceCarrier();
  c.n_prb = 12;
  EXPECT_GE(nr_max_rate(std::vector<CarrierConfig>{c}), base);
}

TEST(EffectiveRate, Examples) {
  EXPECT_DOUBLE_EQ(effective_rate(12.59e6, 1, 0.0), 12.59e6);
  EXPECT_DOUBLE_EQ(effective_rate(12.59e6, 0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(effective_rate(12.59e6, 2, 0.5), 12.59e6);
  EXPECT_DOUBLE_EQ(effective_rate(12.59e6, 7, 1.0), 0.0);
}

TEST(SnrAtPower, Examples) {
  EXPECT_DOUBLE_EQ(*snr_at_power({3.0, 5}, 5), 3.0);
  EXPECT_FALSE(snr_at_power({3.0, 5}, 0).has_value());
  EXPECT_NEAR(*snr_at_power({1.5, 5}, 1), 1.5 + 10 * std::log10(0.2), 1e-12);
  EXPECT_NEAR(*snr_at_power({1.5, 5}, 1), -5.49, 0.01);
}

TEST(SnrAtPower, OutOfRange) {
  EXPECT_THROW(snr_at_power({3.0, 5}, 6), std::domain_error);
  EXPECT_THROW(snr_at_power({3.0, 5}, -1), std::domain_error);
}

TEST(BerAtSnr, DefaultCurve) {
  const BerCurve c = BerCurve::default_curve();
  EXPECT_EQ(ber_at_snr(c, 0.0), 0.0);
  EXPECT_EQ(ber_at_snr(c, -1.0), 0.0);
  EXPECT_EQ(ber_at_snr(c, -20.0), 0.5);
  EXPECT_DOUBLE_EQ(ber_at_snr(c, -5.5), 0.25);
}

TEST(BerAtSnr, EmptyCurveRejected) { EXPECT_THROW(ber_at_snr(BerCurve{}, 0.0), ConfigError); }

TEST(BerCurve, InvalidPointsRejected) {
  EXPECT_THROW(BerCurve({{0.0, 0.1}, {0.0, 0.0}}), ConfigError);
  EXPECT_THROW(BerCurve({{-1.0, 0.1}, {0.0, 0.2}}), ConfigError);
  EXPECT_THROW(BerCurve({{-1.0, 0.6}}), ConfigError);
}

TEST(BerCurve, CsvWithAndWithoutHeader) {
  std::istringstream with("snr_db,ber\n-10,0.5\n-1,0\n");
  std::istringstream without("-10,0.5\n-1,0\n");
  EXPECT_EQ(BerCurve::from_csv(with).points(), BerCurve::default_curve().points());
  EXPECT_EQ(BerCurve::from_csv(without).points(), BerCurve::default_curve().points());
}

TEST(BerCurve, CsvGarbageRejected) {
  std::istringstream bad("-10,0.5\nnope,0\n");
  EXPECT_THROW(BerCurve::from_csv(bad), ConfigError);
}

// Random valid curves: BER never increases with SNR.
TEST(BerAtSnr, MonotoneOnRandomCurves) {
  Stream rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 6));
    std::vector<BerCurve::Point> pts;
    double x = rng.uniform_real(-30, 0);
    double y = 0.5;
    for (int i = 0; i < n; ++i) {
      y = rng.uniform_real(0, y);
      pts.emplace_back(x, y);
      x += rng.uniform_real(0.1, 5);
    }
    const BerCurve c(pts);
    double prev = 1.0;
    for (double s = -40; s <= 20; s += 0.25) {
      const double b = ber_at_snr(c, s);
      ASSERT_LE(b, prev + 1e-15);
      ASSERT_GE(b, 0.0);
      ASSERT_LE(b, 0.5);
      prev = b;
    }
  }
}

TEST(MinBundle, Examples) {
  const BerCurve curve = BerCurve::default_curve();
  const LinkBudget lb{3.0, 5};
  auto b = min_bundle(kC, 5, lb, curve, 11, 50, 10, kC);
  ASSERT_TRUE(b);
  EXPECT_EQ(*b, (Bundle{1, 5, 2}));

  EXPECT_FALSE(min_bundle(kC, 5, lb, curve, 0, 50, 10, kC));

  b = min_bundle(3 * kC, 5, lb, curve, 11, 50, 10, kC);
  ASSERT_TRUE(b);
  EXPECT_EQ(*b, (Bundle{3, 5, 2}));
}

TEST(MinBundle, PoolOverload) {
  ResourcePool pool = ResourcePool::full(11, 50, 10);
  pool.block_free[0] = false;
  const auto b = min_bundle(2 * kC, 3, {3.0, 5}, BerCurve::default_curve(), pool, kC);
  ASSERT_TRUE(b);
  EXPECT_EQ(*b, (Bundle{2, 3, 2}));
}

TEST(MinBundle, CpuOrPowerShortIsInfeasible) {
  const BerCurve curve = BerCurve::default_curve();
  EXPECT_FALSE(min_bundle(kC, 6, {3.0, 5}, curve, 11, 5, 10, kC));
  EXPECT_FALSE(min_bundle(3 * kC, 1, {3.0, 5}, curve, 3, 50, 1, kC));
  // Short on power, extra blocks make up for the lower level.
  EXPECT_EQ(*min_bundle(kC, 1, {3.0, 5}, curve, 11, 50, 1, kC), (Bundle{2, 1, 1}));
}

TEST(MinBundle, NonPositiveDemandRejected) {
  EXPECT_THROW(min_bundle(0.0, 1, {3.0, 5}, BerCurve::default_curve(), 11, 50, 10, kC),
               std::invalid_argument);
}

// Exhaustive check over the whole (K, level) grid: the result meets the
// rate, takes exactly the CPU demand, and nothing earlier in (K, level)
// order fits.
TEST(MinBundle, MatchesEnumeration) {
  Stream rng(11);
  const BerCurve curve = BerCurve::default_curve();
  for (int trial = 0; trial < 5000; ++trial) {
    const int levels = static_cast<int>(rng.uniform_int(1, 8));
    const LinkBudget lb{rng.uniform_real(-8.0, 4.0), levels};
    const double demand = rng.uniform_real(0.1, 5.0) * kC;
    const int cpu = static_cast<int>(rng.uniform_int(0, 12));
    const int fb = static_cast<int>(rng.uniform_int(0, 11));
    const int fc = static_cast<int>(rng.uniform_int(0, 50));
    const int fp = static_cast<int>(rng.uniform_int(0, 10));

    std::optional<Bundle> expect;
    if (cpu <= fc) {
      for (int k = 1; k <= fb && !expect; ++k) {
        for (int l = 1; l <= std::min(levels, fp); ++l) {
          const double snr = *snr_at_power(lb, l);
          if (effective_rate(kC, k, curve.at(snr)) >= demand) {
            expect = Bundle{k, cpu, l};
            break;
          }
        }
      }
    }
    const auto got = min_bundle(demand, cpu, lb, curve, fb, fc, fp, kC);
    ASSERT_EQ(got.has_value(), expect.has_value()) << "trial " << trial;
    if (got) {
      ASSERT_EQ(*got, *expect) << "trial " << trial;
      EXPECT_EQ(got->cpu_levels, cpu);
      EXPECT_GE(effective_rate(kC, got->num_blocks, curve.at(*snr_at_power(lb, got->power_level))),
                demand);
    }
  }
}

TEST(BundleOptions, ParetoFrontInBlockOrder) {
  const BerCurve curve = BerCurve::default_curve();
  const auto opts = bundle_options(kC, 4, {3.0, 5}, curve, 11, 50, 10, kC);
  ASSERT_EQ(opts.size(), 2u);
  EXPECT_EQ(opts[0], (Bundle{1, 4, 2}));
  EXPECT_EQ(opts[1], (Bundle{2, 4, 1}));
  EXPECT_TRUE(bundle_options(kC, 60, {3.0, 5}, curve, 11, 50, 10, kC).empty());
}

TEST(BundleOptions, FirstIsMinBundleAndFrontIsStrict) {
  Stream rng(12);
  const BerCurve curve = BerCurve::default_curve();
  for (int trial = 0; trial < 3000; ++trial) {
    const LinkBudget lb{rng.uniform_real(-8.0, 4.0), static_cast<int>(rng.uniform_int(1, 8))};
    const double demand = rng.uniform_real(0.1, 5.0) * kC;
    const int fb = static_cast<int>(rng.uniform_int(0, 11));
    const int fp = static_cast<int>(rng.uniform_int(0, 10));
    const auto opts = bundle_options(demand, 2, lb, curve, fb, 50, fp, kC);
    const auto mb = min_bundle(demand, 2, lb, curve, fb, 50, fp, kC);
    ASSERT_EQ(opts.empty(), !mb.has_value());
    if (opts.empty()) continue;
    EXPECT_EQ(opts.front(), *mb);
    for (size_t i = 1; i < opts.size(); ++i) {
      EXPECT_GT(opts[i].num_blocks, opts[i - 1].num_blocks);
      EXPECT_LT(opts[i].power_level, opts[i - 1].power_level);
    }
    // Whatever min_bundle picks under a tighter power cap is on the front.
    for (int cap = 1; cap <= fp; ++cap) {
      const auto tight = min_bundle(demand, 2, lb, curve, fb, 50, cap, kC);
      if (tight) {
        EXPECT_NE(std::find(opts.begin(), opts.end(), *tight), opts.end());
      }
    }
  }
}

}  // namespace
}  // namespace ranslice::phy
