#pragma once

#include <cstdint>
#include <limits>

namespace wavesim {

inline constexpr double kActionMinAccel = -3.0;
inline constexpr double kActionMaxAccel = 1.5;
inline constexpr double kSpeedLimit = 35.0;     // [m/s]
inline constexpr double kTtcThreshold = 6.0;    // [s]
inline constexpr double kNoLeaderGap = 1e6;     // [m]

enum class WrapperFlag : std::uint8_t {
  kPass = 0,
  kFailsafe = 1,
  kGapClose = 2,
  kEmergencyBrake = 3,  // supplemental low-gap brake applied by the simulator
};

const char* to_string(WrapperFlag flag);

// Coefficients of the inflated ego speed v (1 + gain) + offset used in the
// closing-speed surrogate.
struct ClosingSpeedCoefficients {
  double gain = 4.0 / 30.0;
  double offset = 1.0;
};

double closing_speed(double v, double v_lead,
                     const ClosingSpeedCoefficients& c = {});

// max(120, 6 v).
double gap_closing_threshold(double v);

// 6 * closing_speed(v, v_lead); may be negative, in which case it never fires.
double failsafe_threshold(double v, double v_lead,
                          const ClosingSpeedCoefficients& c = {});

// h / closing_speed when closing, +inf otherwise.
double ttc(double v, double v_lead, double h,
           const ClosingSpeedCoefficients& c = {});

struct WrappedAccel {
  double accel;
  WrapperFlag flag;
};

// Applies failsafe / gap-closing overrides to a raw policy acceleration, then
// clips so the post-step speed stays within [0, kSpeedLimit]. Throws
// RangeError when a_raw is outside [kActionMinAccel, kActionMaxAccel].
WrappedAccel wrap_acceleration(double a_raw, double v, double v_lead, double h,
                               double dt,
                               const ClosingSpeedCoefficients& c = {});

}  // namespace wavesim
