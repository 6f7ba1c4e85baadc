#include "wavesim/acc_plant.hpp"

#include <algorithm>

#include "wavesim/errors.hpp"
#include "wavesim/units.hpp"

namespace wavesim {

void AccSettings::validate() const {
  const double mph = speed_setting_mph();
  if (!(mph >= kAccMinSpeedMph - 1e-9 && mph <= kAccMaxSpeedMph + 1e-9)) {
    throw RangeError("ACC speed setting outside [20, 73] mph");
  }
  if (gap_setting < 1 || gap_setting > 3) {
    throw RangeError("ACC gap setting must be 1, 2 or 3 bars");
  }
}

double AccSettings::speed_setting_mph() const {
  return units::mps_to_mph(speed_setting);
}

AccSettings AccSettings::from_mph(double mph, int bars) {
  return AccSettings{units::mph_to_mps(mph), bars};
}

double acc_time_gap(int bars) {
  switch (bars) {
    case 1:
      return 1.2;
    case 2:
      return 1.5;
    case 3:
      return 2.0;
    default:
      throw RangeError("ACC gap setting must be 1, 2 or 3 bars");
  }
}

void AccPlantParams::validate() const {
  if (!(k_gap > 0 && k_speed > 0 && k_free > 0)) {
    throw DomainError("ACC plant gains must be positive");
  }
  if (!(accel_bounds[0] < 0 && accel_bounds[1] > 0)) {
    throw DomainError("ACC plant accel bounds must straddle zero");
  }
  if (actuation_delay < 0) throw DomainError("ACC actuation delay must be >= 0");
}

double acc_plant_accel(const AccPlantParams& p, const AccSettings& settings,
                       double v, double v_lead, double h, bool has_leader) {
  const double speed_term = p.k_free * (settings.speed_setting - v);
  double acc = speed_term;
  if (has_leader && h < kLeaderDetectRange) {
    const double tau = acc_time_gap(settings.gap_setting);
    const double follow = p.k_gap * (h - tau * v) + p.k_speed * (v_lead - v);
    acc = std::min(follow, speed_term);
  }
  return std::clamp(acc, p.accel_bounds[0], p.accel_bounds[1]);
}

}  // namespace wavesim
