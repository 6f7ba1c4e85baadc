#pragma once

#include <deque>

#include "wavesim/acc_plant.hpp"
#include "wavesim/controller.hpp"
#include "wavesim/follower_stopper.hpp"
#include "wavesim/idm.hpp"

namespace wavesim {

class IdmController final : public Controller {
 public:
  explicit IdmController(IdmParams params);
  ControlOutput control(const ControlContext& ctx, std::mt19937_64& rng) override;
  std::unique_ptr<Controller> clone() const override;
  const char* name() const override { return "idm"; }
  const IdmParams& params() const { return params_; }

 private:
  IdmParams params_;
};

// Executes the FollowerStopper velocity command as a = (v_cmd - v) / dt,
// clamped to the accel bounds.
class FollowerStopperController final : public Controller {
 public:
  explicit FollowerStopperController(FsParams params, double min_accel = -3.0,
                                     double max_accel = 1.5);
  ControlOutput control(const ControlContext& ctx, std::mt19937_64& rng) override;
  std::unique_ptr<Controller> clone() const override;
  const char* name() const override { return "follower_stopper"; }

 private:
  FsParams params_;
  double min_accel_;
  double max_accel_;
};

// ACC plant whose settings take effect after the plant's actuation delay.
class AccController : public Controller {
 public:
  AccController(AccPlantParams plant, AccSettings initial);
  ControlOutput control(const ControlContext& ctx, std::mt19937_64& rng) override;
  std::unique_ptr<Controller> clone() const override;
  const char* name() const override { return "stock_acc"; }

  // Queues a settings request; applied actuation_delay steps later.
  void request(const AccSettings& settings);
  const AccSettings& active_settings() const { return active_; }
  const AccSettings& latest_request() const;

 protected:
  AccPlantParams plant_;
  struct Pending {
    AccSettings settings;
    int wait;
  };
  AccSettings active_;
  std::deque<Pending> pending_;
};

}  // namespace wavesim
