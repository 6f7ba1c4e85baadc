#pragma once

#include <array>

namespace wavesim {

struct FsParams {
  double v_des = 15.0;
  std::array<double, 3> dx0 = {4.5, 5.25, 6.0};  // base thresholds [m]
  std::array<double, 3> d = {1.5, 1.0, 0.5};     // deceleration rates [m/s^2]

  void validate() const;
};

// Region thresholds Δx_k = Δx_k^0 + min(v_lead - v, 0)^2 / (2 d_k).
std::array<double, 3> follower_stopper_thresholds(const FsParams& p, double v,
                                                  double v_lead);

// FollowerStopper velocity command. The two adaptation bands blend toward
// u = min(max(v_lead, 0), v_des) so the command is continuous in dx.
double follower_stopper_cmd(const FsParams& p, double v, double v_lead,
                            double dx);

}  // namespace wavesim
