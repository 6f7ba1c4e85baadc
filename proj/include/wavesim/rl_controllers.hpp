#pragma once

#include <Eigen/Dense>
#include <deque>
#include <functional>
#include <memory>

#include "wavesim/builtin_controllers.hpp"
#include "wavesim/idm.hpp"
#include "wavesim/policy.hpp"
#include "wavesim/wrappers.hpp"

namespace wavesim {

// Supplies actions during training. Receives the policy that would act and
// the observation it sees. When unset, controllers act with the policy mode.
using ActionSource = std::function<PolicyAction(const Policy&, const Eigen::VectorXd&)>;

// Acceleration policy behind the failsafe and gap-closing wrappers. While
// disengaged it drives as an IDM human but keeps its histories current.
class RlAccelController final : public Controller {
 public:
  RlAccelController(std::shared_ptr<const Policy> policy, ClosingSpeedCoefficients closing = {},
                    IdmParams fallback = {});

  ControlOutput control(const ControlContext& ctx, std::mt19937_64& rng) override;
  std::unique_ptr<Controller> clone() const override;
  const char* name() const override { return "rl_accel"; }
  bool uses_advice() const override { return true; }

  void set_engaged(bool engaged) { engaged_ = engaged; }
  bool engaged() const { return engaged_; }
  void set_action_source(ActionSource source) { source_ = std::move(source); }

  Eigen::VectorXd observe(const ControlContext& ctx) const;
  const Eigen::VectorXd& last_obs() const { return last_obs_; }
  double last_raw_accel() const { return last_raw_; }

 private:
  std::shared_ptr<const Policy> policy_;
  ClosingSpeedCoefficients closing_;
  IdmParams fallback_;
  bool engaged_ = true;
  ActionSource source_;
  std::deque<double> speeds_;
  Eigen::VectorXd last_obs_;
  double last_raw_ = 0.0;
};

// ACC set-point policies on top of the ACC plant: speed requests are clipped
// around the recent mean speed and both settings pass through the plant's
// actuation delay. The low-speed policy acts below switch_mph.
class RlAccController final : public AccController {
 public:
  RlAccController(std::shared_ptr<const Policy> low_speed,
                  std::shared_ptr<const Policy> high_speed, AccPlantParams plant,
                  double switch_mph = 60.0, IdmParams fallback = {});

  ControlOutput control(const ControlContext& ctx, std::mt19937_64& rng) override;
  std::unique_ptr<Controller> clone() const override;
  const char* name() const override { return "rl_acc"; }
  bool uses_advice() const override { return true; }

  void set_engaged(bool engaged) { engaged_ = engaged; }
  bool engaged() const { return engaged_; }
  void set_action_source(ActionSource source) { source_ = std::move(source); }

  // Policy acting at speed v (pure function of v).
  const Policy& policy_for(double v) const;
  Eigen::VectorXd observe(const ControlContext& ctx, const Policy& policy) const;
  const Eigen::VectorXd& last_obs() const { return last_obs_; }

 private:
  std::shared_ptr<const Policy> low_;
  std::shared_ptr<const Policy> high_;
  double switch_mph_;
  IdmParams fallback_;
  bool engaged_ = true;
  ActionSource source_;
  std::deque<double> speeds_;    // [m/s]
  std::deque<double> accels_;    // [m/s^2]
  std::deque<double> requests_;  // [mph]
  Eigen::VectorXd last_obs_;
};

}  // namespace wavesim
