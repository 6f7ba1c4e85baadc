#pragma once

#include <Eigen/Dense>
#include <span>

#include "wavesim/acc_plant.hpp"
#include "wavesim/policy.hpp"
#include "wavesim/speed_planner.hpp"
#include "wavesim/wrappers.hpp"

namespace wavesim {

// Min-max ranges used to rescale raw quantities to [-1, 1]. Values outside a
// range saturate.
namespace obs_range {
inline constexpr double kSpeedMax = 35.0;     // [m/s], from 0
inline constexpr double kGapMax = 250.0;      // [m], from 0
inline constexpr double kHminAbs = 250.0;     // [m], symmetric
inline constexpr double kAccelAbs = 3.0;      // [m/s^2], symmetric
inline constexpr double kMphMin = 20.0;
inline constexpr double kMphMax = 73.0;
}  // namespace obs_range

inline constexpr int kAccelSpeedHistory = 5;
inline constexpr int kAccLowAccelHistory = 5;
inline constexpr int kAccLowSpeedHistory = 10;
inline constexpr int kAccLowRequestHistory = 10;
inline constexpr int kAccHighAccelHistory = 6;

// 2 (x - lo) / (hi - lo) - 1, clamped to [-1, 1].
double scale_unit(double x, double lo, double hi);

// Last k samples of `history` (oldest first). Short histories are padded at
// the front by replicating their oldest sample, or `fallback` when empty.
Eigen::VectorXd recent_samples(std::span<const double> history, int k, double fallback);

struct AccelObsInput {
  double v = 0.0;
  double v_lead = 0.0;
  double gap = 0.0;
  double h_min = 0.0;
  double h_max = 120.0;
  std::span<const double> speed_history;  // past ego speeds, oldest first
  SpeedPlannerAdvice advice;
};

// [v, v_lead, h, h_min, h_max, 5 past speeds, v_sp, v_200, v_500, v_1000]
Eigen::VectorXd build_obs_accel(const AccelObsInput& in);

struct AccObsInput {
  double v = 0.0;
  double gap = kNoLeaderGap;
  bool has_leader = false;
  double speed_setting_mph = kAccMaxSpeedMph;
  int gap_setting = 2;
  SpeedPlannerAdvice advice;
  std::span<const double> accel_history;    // [m/s^2], oldest first
  std::span<const double> speed_history;    // [m/s]
  std::span<const double> request_history;  // requested settings [mph]
};

// Base [v, v_sp, h_max flag, leader flag, speed setting, gap bar] followed by
// the variant's extras:
//   low:  v_200, v_500, v_1000, 5 accels, 10 speeds, 10 requested speeds
//   high: 6 accels
Eigen::VectorXd build_obs_acc(const AccObsInput& in, PolicyVariant variant);

bool leader_in_range(double gap, bool has_leader);

}  // namespace wavesim
