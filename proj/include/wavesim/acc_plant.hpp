#pragma once

#include <array>

namespace wavesim {

inline constexpr double kAccMinSpeedMph = 20.0;
inline constexpr double kAccMaxSpeedMph = 73.0;
inline constexpr double kLeaderDetectRange = 80.0;  // [m]

// Driver-facing ACC set points. Speed is stored in m/s.
struct AccSettings {
  double speed_setting = 30.0;  // [m/s]
  int gap_setting = 2;          // bars, 1..3

  void validate() const;
  double speed_setting_mph() const;
  static AccSettings from_mph(double mph, int bars);
};

// Constant time gap associated with a gap bar (1.2, 1.5, 2.0 s).
double acc_time_gap(int bars);

// Stand-in linear ACC: constant-time-gap following within detection range,
// speed regulation otherwise.
struct AccPlantParams {
  double k_gap = 0.1;    // [1/s^2]
  double k_speed = 0.9;  // [1/s]
  double k_free = 0.3;   // [1/s]
  std::array<double, 2> accel_bounds = {-3.0, 1.5};
  int actuation_delay = 2;  // settings latency [steps]

  void validate() const;
};

// h is ignored when has_leader is false; a leader beyond kLeaderDetectRange is
// treated as absent.
double acc_plant_accel(const AccPlantParams& p, const AccSettings& settings,
                       double v, double v_lead, double h, bool has_leader = true);

}  // namespace wavesim
