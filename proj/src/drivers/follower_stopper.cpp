#include "wavesim/follower_stopper.hpp"

#include <algorithm>

#include "wavesim/errors.hpp"

namespace wavesim {

void FsParams::validate() const {
  if (!(v_des > 0)) throw DomainError("FollowerStopper v_des must be positive");
  for (int k = 0; k < 3; ++k) {
    if (!(dx0[k] > 0 && d[k] > 0)) {
      throw DomainError("FollowerStopper thresholds and rates must be positive");
    }
  }
  if (!(dx0[0] < dx0[1] && dx0[1] < dx0[2])) {
    throw DomainError("FollowerStopper base thresholds must increase");
  }
  if (!(d[0] > d[1] && d[1] > d[2])) {
    throw DomainError("FollowerStopper deceleration rates must decrease");
  }
}

std::array<double, 3> follower_stopper_thresholds(const FsParams& p, double v,
                                                  double v_lead) {
  const double closing = std::min(v_lead - v, 0.0);
  std::array<double, 3> dx{};
  for (int k = 0; k < 3; ++k) {
    dx[k] = p.dx0[k] + closing * closing / (2.0 * p.d[k]);
  }
  return dx;
}

double follower_stopper_cmd(const FsParams& p, double v, double v_lead,
                            double dx) {
  const auto [dx1, dx2, dx3] = follower_stopper_thresholds(p, v, v_lead);
  const double u = std::min(std::max(v_lead, 0.0), p.v_des);
  if (dx <= dx1) return 0.0;
  if (dx <= dx2) return u * (dx - dx1) / (dx2 - dx1);
  if (dx <= dx3) return u + (p.v_des - u) * (dx - dx2) / (dx3 - dx2);
  return p.v_des;
}

}  // namespace wavesim
