#include "wavesim/setpoint.hpp"

#include <algorithm>
#include <numeric>

#include "wavesim/acc_plant.hpp"
#include "wavesim/errors.hpp"

namespace wavesim {

double clip_speed_setting(double raw_mph,
                          std::span<const double> speed_history_mph) {
  if (speed_history_mph.size() < kClipHistoryLength) {
    throw InsufficientHistory("speed-setting clip needs 10 speed samples");
  }
  const auto recent = speed_history_mph.last(kClipHistoryLength);
  const double mean =
      std::accumulate(recent.begin(), recent.end(), 0.0) / kClipHistoryLength;
  const double lower = mean - kClipBelowMeanMph;
  const double upper = mean + kClipAboveMeanMph;
  const double s = std::min(std::max(raw_mph, lower), upper);
  return std::min(std::max(s, kAccMinSpeedMph), kAccMaxSpeedMph);
}

double estimate_accel(std::span<const double> speed_history, double dt) {
  constexpr std::size_t kWindow = 4;
  if (speed_history.size() < kWindow + 1) {
    throw InsufficientHistory("acceleration estimate needs 5 speed samples");
  }
  const auto recent = speed_history.last(kWindow + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    sum += (recent[i + 1] - recent[i]) / dt;
  }
  return sum / kWindow;
}

}  // namespace wavesim
