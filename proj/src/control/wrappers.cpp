#include "wavesim/wrappers.hpp"

#include <algorithm>
#include <limits>

#include "wavesim/errors.hpp"

namespace wavesim {

const char* to_string(WrapperFlag flag) {
  switch (flag) {
    case WrapperFlag::kPass:
      return "pass";
    case WrapperFlag::kFailsafe:
      return "failsafe";
    case WrapperFlag::kGapClose:
      return "gap_close";
    case WrapperFlag::kEmergencyBrake:
      return "emergency_brake";
  }
  return "unknown";
}

double closing_speed(double v, double v_lead, const ClosingSpeedCoefficients& c) {
  return (v * (1.0 + c.gain) + c.offset) - v_lead;
}

double gap_closing_threshold(double v) { return std::max(120.0, 6.0 * v); }

double failsafe_threshold(double v, double v_lead,
                          const ClosingSpeedCoefficients& c) {
  return kTtcThreshold * closing_speed(v, v_lead, c);
}

double ttc(double v, double v_lead, double h, const ClosingSpeedCoefficients& c) {
  const double v_diff = closing_speed(v, v_lead, c);
  if (v_diff > 0) return h / v_diff;
  return std::numeric_limits<double>::infinity();
}

WrappedAccel wrap_acceleration(double a_raw, double v, double v_lead, double h,
                               double dt, const ClosingSpeedCoefficients& c) {
  if (!(a_raw >= kActionMinAccel && a_raw <= kActionMaxAccel)) {
    throw RangeError("raw acceleration outside [-3, 1.5] m/s^2");
  }
  WrappedAccel out{a_raw, WrapperFlag::kPass};
  const double time_to_collision = ttc(v, v_lead, h, c);
  if (time_to_collision <= kTtcThreshold) {
    out = {kActionMinAccel, WrapperFlag::kFailsafe};
  } else if (h >= gap_closing_threshold(v)) {
    out = {kActionMaxAccel, WrapperFlag::kGapClose};
  }
  // Speed-limit clip is applied last.
  out.accel = std::clamp(out.accel, -v / dt, (kSpeedLimit - v) / dt);
  return out;
}

}  // namespace wavesim
