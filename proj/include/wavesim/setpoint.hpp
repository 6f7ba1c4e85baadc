#pragma once

#include <span>

namespace wavesim {

inline constexpr int kClipHistoryLength = 10;
inline constexpr double kClipBelowMeanMph = 15.0;
inline constexpr double kClipAboveMeanMph = 5.0;

// Clamps a requested ACC speed setting to [m - 15, m + 5] mph around the mean
// m of the last ten speed samples, then to [20, 73] mph. Uses the most recent
// ten samples when more are given; throws InsufficientHistory on fewer.
double clip_speed_setting(double raw_mph, std::span<const double> speed_history_mph);

// Sliding-window acceleration: mean of the last four first differences of the
// speed history divided by dt. Needs at least five samples.
double estimate_accel(std::span<const double> speed_history, double dt = 0.1);

}  // namespace wavesim
