#include "ranslice/phy.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ranslice/errors.h"

namespace ranslice::phy {

namespace {

bool valid_f_scale(double f) { return f == 1.0 || f == 0.8 || f == 0.75 || f == 0.4; }

void validate(const CarrierConfig& c) {
  if (!valid_f_scale(c.f_scale)) throw ConfigError("f_scale must be one of 1, 0.8, 0.75, 0.4");
  if (c.v_layers < 1) throw ConfigError("v_layers must be >= 1");
  if (c.q_m < 1) throw ConfigError("q_m must be >= 1");
  if (c.mu < 0) throw ConfigError("mu must be >= 0");
  if (c.n_prb < 1) throw ConfigError("n_prb must be >= 1");
  if (!(c.overhead >= 0.0 && c.overhead < 1.0)) throw ConfigError("overhead must be in [0, 1)");
}

}  // namespace

double symbol_duration(int mu) { return 1e-3 / (14.0 * std::ldexp(1.0, mu)); }

double nr_max_rate(std::span<const CarrierConfig> carriers) {
  double rate = 0.0;
  for (const auto& c : carriers) {
    validate(c);
    rate += c.v_layers * c.q_m * c.f_scale * kRMax * (c.n_prb * 12.0 / symbol_duration(c.mu)) *
            (1.0 - c.overhead);
  }
  return rate;
}

BerCurve::BerCurve(std::vector<Point> points) : points_(std::move(points)) {
  for (size_t i = 0; i < points_.size(); ++i) {
    const auto [snr, ber] = points_[i];
    if (!std::isfinite(snr) || !(ber >= 0.0 && ber <= 0.5)) {
      throw ConfigError("ber curve point " + std::to_string(i) + " out of range");
    }
    if (i > 0) {
      if (!(snr > points_[i - 1].first)) {
        throw ConfigError("ber curve snr values must be strictly increasing");
      }
      if (ber > points_[i - 1].second) {
        throw ConfigError("ber curve must be non-increasing in snr");
      }
    }
  }
}

BerCurve BerCurve::default_curve() { return BerCurve({{-10.0, 0.5}, {-1.0, 0.0}}); }

BerCurve BerCurve::from_csv(std::istream& in) {
  std::vector<Point> points;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("ber csv: expected two columns: " + line);
    double snr = 0.0;
    double ber = 0.0;
    try {
      snr = std::stod(line.substr(0, comma));
      ber = std::stod(line.substr(comma + 1));
    } catch (const std::logic_error&) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw ConfigError("ber csv: non-numeric row: " + line);
    }
    first = false;
    points.emplace_back(snr, ber);
  }
  return BerCurve(std::move(points));
}

BerCurve BerCurve::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ber curve file " + path, "ber_curve");
  return from_csv(in);
}

double BerCurve::at(double snr_db) const {
  if (points_.empty()) throw ConfigError("ber curve is empty");
  if (snr_db <= points_.front().first) return points_.front().second;
  if (snr_db >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), snr_db,
                             [](double v, const Point& p) { return v < p.first; });
  auto lo = hi - 1;
  const double t = (snr_db - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double ber_at_snr(const BerCurve& curve, double snr_db) { return curve.at(snr_db); }

std::optional<double> snr_at_power(const LinkBudget& budget, int level) {
  if (level < 0 || level > budget.power_levels) {
    throw std::domain_error("power level " + std::to_string(level) + " outside [0, " +
                            std::to_string(budget.power_levels) + "]");
  }
  if (level == 0) return std::nullopt;
  return budget.max_snr_db +
         10.0 * std::log10(static_cast<double>(level) / budget.power_levels);
}

std::optional<Bundle> min_bundle(double demand_rate, int cpu_demand, const LinkBudget& budget,
                                 const BerCurve& curve, int free_blocks, int free_cpu,
                                 int free_power, double per_block_rate_c) {
  if (!(demand_rate > 0.0)) throw std::invalid_argument("demand_rate must be positive");
  if (cpu_demand > free_cpu) return std::nullopt;
  const int max_level = std::min(budget.power_levels, free_power);
  if (max_level < 1) return std::nullopt;

  // BER per level is independent of K; evaluate once.
  std::vector<double> ber(static_cast<size_t>(max_level) + 1);
  for (int level = 1; level <= max_level; ++level) {
    ber[level] = curve.at(*snr_at_power(budget, level));
  }
  for (int k = 1; k <= free_blocks; ++k) {
    for (int level = 1; level <= max_level; ++level) {
      if (effective_rate(per_block_rate_c, k, ber[level]) >= demand_rate) {
        return Bundle{k, cpu_demand, level};
      }
    }
  }
  return std::nullopt;
}

std::vector<Bundle> bundle_options(double demand_rate, int cpu_demand, const LinkBudget& budget,
                                   const BerCurve& curve, int free_blocks, int free_cpu,
                                   int free_power, double per_block_rate_c) {
  if (!(demand_rate > 0.0)) throw std::invalid_argument("demand_rate must be positive");
  std::vector<Bundle> out;
  if (cpu_demand > free_cpu) return out;
  const int max_level = std::min(budget.power_levels, free_power);
  int best_level = max_level + 1;
  for (int k = 1; k <= free_blocks && best_level > 1; ++k) {
    for (int level = 1; level < best_level; ++level) {
      if (effective_rate(per_block_rate_c, k, curve.at(*snr_at_power(budget, level))) >=
          demand_rate) {
        out.push_back(Bundle{k, cpu_demand, level});
        best_level = level;
        break;
      }
    }
  }
  return out;
}

}  // namespace ranslice::phy
