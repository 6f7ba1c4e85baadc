#include "wavesim/rl_controllers.hpp"

#include <algorithm>
#include <vector>

#include "wavesim/errors.hpp"
#include "wavesim/observation.hpp"
#include "wavesim/setpoint.hpp"
#include "wavesim/units.hpp"

namespace wavesim {

namespace {

constexpr std::size_t kHistoryCap = 16;

void push_capped(std::deque<double>& d, double x) {
  d.push_back(x);
  if (d.size() > kHistoryCap) d.pop_front();
}

std::vector<double> as_vector(const std::deque<double>& d) { return {d.begin(), d.end()}; }

}  // namespace

RlAccelController::RlAccelController(std::shared_ptr<const Policy> policy,
                                     ClosingSpeedCoefficients closing, IdmParams fallback)
    : policy_(std::move(policy)), closing_(closing), fallback_(fallback) {
  if (!policy_) throw ConfigError("rl_accel controller needs a policy");
  if (policy_->variant() != PolicyVariant::kAccel) {
    throw ConfigError("rl_accel controller needs an accel policy");
  }
}

Eigen::VectorXd RlAccelController::observe(const ControlContext& ctx) const {
  const auto hist = as_vector(speeds_);
  AccelObsInput in;
  in.v = ctx.v;
  in.v_lead = ctx.v_lead;
  in.gap = ctx.gap;
  in.h_min = failsafe_threshold(ctx.v, ctx.v_lead, closing_);
  in.h_max = gap_closing_threshold(ctx.v);
  in.speed_history = hist;
  in.advice = ctx.advice;
  return build_obs_accel(in);
}

ControlOutput RlAccelController::control(const ControlContext& ctx, std::mt19937_64& rng) {
  ControlOutput out;
  if (!engaged_) {
    out.accel = idm_accel(fallback_, ctx.v, ctx.v_lead, ctx.gap, rng);
  } else {
    last_obs_ = observe(ctx);
    const PolicyAction action =
        source_ ? source_(*policy_, last_obs_) : policy_->mode(policy_->forward(last_obs_));
    last_raw_ = squash(action.u, continuous_bounds(PolicyVariant::kAccel));
    last_raw_ = std::clamp(last_raw_, kActionMinAccel, kActionMaxAccel);
    const WrappedAccel w = wrap_acceleration(last_raw_, ctx.v, ctx.v_lead, ctx.gap, ctx.dt,
                                             closing_);
    out = {w.accel, w.flag};
  }
  push_capped(speeds_, ctx.v);
  return out;
}

std::unique_ptr<Controller> RlAccelController::clone() const {
  return std::make_unique<RlAccelController>(*this);
}

RlAccController::RlAccController(std::shared_ptr<const Policy> low_speed,
                                 std::shared_ptr<const Policy> high_speed,
                                 AccPlantParams plant, double switch_mph, IdmParams fallback)
    : AccController(plant, AccSettings::from_mph(kAccMaxSpeedMph, 2)),
      low_(std::move(low_speed)),
      high_(std::move(high_speed)),
      switch_mph_(switch_mph),
      fallback_(fallback) {
  if (!low_ && !high_) throw ConfigError("rl_acc controller needs at least one policy");
  for (const auto* p : {low_.get(), high_.get()}) {
    if (p && !is_acc_variant(p->variant())) {
      throw ConfigError("rl_acc controller needs ACC policies");
    }
  }
}

const Policy& RlAccController::policy_for(double v) const {
  const bool low = units::mps_to_mph(v) < switch_mph_;
  if (low) return low_ ? *low_ : *high_;
  return high_ ? *high_ : *low_;
}

Eigen::VectorXd RlAccController::observe(const ControlContext& ctx, const Policy& policy) const {
  const auto speeds = as_vector(speeds_);
  const auto accels = as_vector(accels_);
  const auto requests = as_vector(requests_);
  const AccSettings& shown = latest_request();
  AccObsInput in;
  in.v = ctx.v;
  in.gap = ctx.gap;
  in.has_leader = ctx.has_leader;
  in.speed_setting_mph = shown.speed_setting_mph();
  in.gap_setting = shown.gap_setting;
  in.advice = ctx.advice;
  in.accel_history = accels;
  in.speed_history = speeds;
  in.request_history = requests;
  return build_obs_acc(in, policy.variant());
}

ControlOutput RlAccController::control(const ControlContext& ctx, std::mt19937_64& rng) {
  ControlOutput out;
  if (!engaged_) {
    AccController::control(ctx, rng);  // keep the plant's queue moving
    out.accel = idm_accel(fallback_, ctx.v, ctx.v_lead, ctx.gap, rng);
  } else {
    const Policy& policy = policy_for(ctx.v);
    last_obs_ = observe(ctx, policy);
    const PolicyAction action =
        source_ ? source_(policy, last_obs_) : policy.mode(policy.forward(last_obs_));
    const double raw_mph = squash(action.u, continuous_bounds(policy.variant()));

    // previous nine samples plus the current one
    std::vector<double> mph_hist;
    for (double v : speeds_) mph_hist.push_back(units::mps_to_mph(v));
    mph_hist.push_back(units::mps_to_mph(ctx.v));
    while (mph_hist.size() < static_cast<std::size_t>(kClipHistoryLength)) {
      mph_hist.insert(mph_hist.begin(), mph_hist.front());
    }
    const double mph = clip_speed_setting(raw_mph, mph_hist);
    request(AccSettings::from_mph(mph, std::clamp(action.bar, 1, 3)));
    push_capped(requests_, raw_mph);
    out = AccController::control(ctx, rng);
  }
  if (!speeds_.empty()) push_capped(accels_, (ctx.v - speeds_.back()) / ctx.dt);
  push_capped(speeds_, ctx.v);
  return out;
}

std::unique_ptr<Controller> RlAccController::clone() const {
  return std::make_unique<RlAccController>(*this);
}

}  // namespace wavesim
