#include "wavesim/observation.hpp"

#include <algorithm>

#include "wavesim/errors.hpp"

namespace wavesim {

using namespace obs_range;

double scale_unit(double x, double lo, double hi) {
  return std::clamp(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

Eigen::VectorXd recent_samples(std::span<const double> history, int k, double fallback) {
  Eigen::VectorXd out(k);
  const int n = static_cast<int>(history.size());
  const int take = std::min(n, k);
  const double pad = n > 0 ? history[static_cast<std::size_t>(n - take)] : fallback;
  for (int i = 0; i < k - take; ++i) out(i) = pad;
  for (int i = 0; i < take; ++i) out(k - take + i) = history[static_cast<std::size_t>(n - take + i)];
  return out;
}

bool leader_in_range(double gap, bool has_leader) {
  return has_leader && gap < kLeaderDetectRange;
}

namespace {

double speed_unit(double v) { return scale_unit(v, 0.0, kSpeedMax); }
double accel_unit(double a) { return scale_unit(a, -kAccelAbs, kAccelAbs); }
double mph_unit(double mph) { return scale_unit(mph, kMphMin, kMphMax); }

}  // namespace

Eigen::VectorXd build_obs_accel(const AccelObsInput& in) {
  Eigen::VectorXd obs(observation_size(PolicyVariant::kAccel));
  obs(0) = speed_unit(in.v);
  obs(1) = speed_unit(in.v_lead);
  obs(2) = scale_unit(in.gap, 0.0, kGapMax);
  obs(3) = scale_unit(in.h_min, -kHminAbs, kHminAbs);
  obs(4) = scale_unit(in.h_max, 0.0, kGapMax);
  const Eigen::VectorXd hist = recent_samples(in.speed_history, kAccelSpeedHistory, in.v);
  for (int i = 0; i < kAccelSpeedHistory; ++i) obs(5 + i) = speed_unit(hist(i));
  obs(10) = speed_unit(in.advice.v_sp);
  obs(11) = speed_unit(in.advice.v_200);
  obs(12) = speed_unit(in.advice.v_500);
  obs(13) = speed_unit(in.advice.v_1000);
  return obs;
}

Eigen::VectorXd build_obs_acc(const AccObsInput& in, PolicyVariant variant) {
  if (!is_acc_variant(variant)) throw ShapeError("build_obs_acc needs an ACC variant");
  if (in.gap_setting < 1 || in.gap_setting > 3) throw DomainError("gap setting must be 1..3");
  Eigen::VectorXd obs(observation_size(variant));
  int k = 0;
  obs(k++) = speed_unit(in.v);
  obs(k++) = speed_unit(in.advice.v_sp);
  obs(k++) = in.advice.max_headway_flag ? 1.0 : 0.0;
  obs(k++) = leader_in_range(in.gap, in.has_leader) ? 1.0 : 0.0;
  obs(k++) = mph_unit(in.speed_setting_mph);
  obs(k++) = static_cast<double>(in.gap_setting - 2);

  auto append = [&](const Eigen::VectorXd& v, double (*f)(double)) {
    for (Eigen::Index i = 0; i < v.size(); ++i) obs(k++) = f(v(i));
  };
  if (variant == PolicyVariant::kAccLow) {
    obs(k++) = speed_unit(in.advice.v_200);
    obs(k++) = speed_unit(in.advice.v_500);
    obs(k++) = speed_unit(in.advice.v_1000);
    append(recent_samples(in.accel_history, kAccLowAccelHistory, 0.0), accel_unit);
    append(recent_samples(in.speed_history, kAccLowSpeedHistory, in.v), speed_unit);
    append(recent_samples(in.request_history, kAccLowRequestHistory, in.speed_setting_mph),
           mph_unit);
  } else {
    append(recent_samples(in.accel_history, kAccHighAccelHistory, 0.0), accel_unit);
  }
  return obs;
}

}  // namespace wavesim
