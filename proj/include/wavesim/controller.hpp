#pragma once

#include <memory>
#include <random>
#include <vector>

#include "wavesim/speed_planner.hpp"
#include "wavesim/wrappers.hpp"

namespace wavesim {

// Everything a longitudinal controller may observe at one step.
struct ControlContext {
  double time = 0.0;
  double dt = 0.1;
  double position = 0.0;
  double v = 0.0;
  double v_lead = 0.0;
  double gap = kNoLeaderGap;
  bool has_leader = true;
  double grade = 0.0;
  SpeedPlannerAdvice advice;
};

struct ControlOutput {
  double accel = 0.0;
  WrapperFlag flag = WrapperFlag::kPass;
};

class Controller {
 public:
  virtual ~Controller() = default;

  // Called exactly once per simulation step; controllers with internal
  // history update it here.
  virtual ControlOutput control(const ControlContext& ctx, std::mt19937_64& rng) = 0;
  virtual std::unique_ptr<Controller> clone() const = 0;
  virtual const char* name() const = 0;
  virtual bool uses_advice() const { return false; }
};

// Owns one controller per vehicle id.
class ControllerBank {
 public:
  ControllerBank() = default;
  ControllerBank(const ControllerBank& other);
  ControllerBank& operator=(const ControllerBank& other);
  ControllerBank(ControllerBank&&) noexcept = default;
  ControllerBank& operator=(ControllerBank&&) noexcept = default;

  void assign(int vehicle_id, std::unique_ptr<Controller> controller);
  bool has(int vehicle_id) const;
  Controller& at(int vehicle_id);
  const Controller& at(int vehicle_id) const;

 private:
  std::vector<std::unique_ptr<Controller>> by_id_;
};

}  // namespace wavesim
