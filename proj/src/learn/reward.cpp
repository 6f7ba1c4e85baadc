#include "wavesim/reward.hpp"

#include <cmath>
#include <numeric>

#include "wavesim/errors.hpp"

namespace wavesim {

namespace {

void check_coeffs(double c1, double c2, double c3, double c4) {
  for (double c : {c1, c2, c3, c4}) {
    if (!std::isfinite(c) || c < 0.0) {
      throw ConfigError("reward coefficients must be finite and non-negative");
    }
  }
}

double fuel_sum(std::span<const double> e) {
  if (e.empty()) throw DomainError("reward needs at least one fuel rate");
  return std::accumulate(e.begin(), e.end(), 0.0);
}

}  // namespace

void AccelRewardCoefficients::validate() const { check_coeffs(c1, c2, c3, c4); }
void AccRewardCoefficients::validate() const { check_coeffs(c1, c2, c3, c4); }

double reward_accel(const AccelRewardCoefficients& c, std::span<const double> fuel_rates,
                    double a_out, double h, double v, double h_min, double h_max) {
  const double n = static_cast<double>(fuel_rates.size());
  double r = -c.c1 * fuel_sum(fuel_rates) / n - c.c2 * a_out * a_out;
  if (h < h_min || h > h_max) r -= c.c3;
  if (h > 10.0 && v > 1.0) r -= c.c4 * h / v;
  return r;
}

double reward_acc(const AccRewardCoefficients& c, double a, double v, double v_sp,
                  std::span<const double> fuel_rates, double h, double h_min, double h_max) {
  const double n = static_cast<double>(fuel_rates.size());
  const double dv = v - v_sp;
  double r = 1.0 - c.c1 * a * a - c.c2 * dv * dv - c.c3 / n * fuel_sum(fuel_rates);
  if (h <= h_min || h >= h_max) r -= c.c4;
  return r;
}

}  // namespace wavesim
