#pragma once

#include <span>

namespace wavesim {

struct AccelRewardCoefficients {
  double c1 = 1.0;   // platoon-mean fuel rate [per g/s]
  double c2 = 0.2;   // squared acceleration
  double c3 = 2.0;   // gap outside [h_min, h_max]
  double c4 = 0.05;  // time gap h / v
  void validate() const;
};

struct AccRewardCoefficients {
  double c1 = 0.02;   // squared acceleration
  double c2 = 0.002;  // squared speed-planner tracking error
  double c3 = 1.0;    // platoon fuel rate sum / n
  double c4 = 1.0;    // intervention (h <= h_min or h >= h_max)
  void validate() const;
};

// -c1 mean(E) - c2 a^2 - c3 [h not in [h_min, h_max]] - c4 (h / v) [h > 10 and v > 1]
double reward_accel(const AccelRewardCoefficients& c, std::span<const double> fuel_rates,
                    double a_out, double h, double v, double h_min, double h_max);

// 1 - c1 a^2 - c2 (v - v_sp)^2 - (c3 / n) sum(E) - c4 [h <= h_min or h >= h_max]
double reward_acc(const AccRewardCoefficients& c, double a, double v, double v_sp,
                  std::span<const double> fuel_rates, double h, double h_min, double h_max);

}  // namespace wavesim
