#include <algorithm>

#include "wavesim/builtin_controllers.hpp"
#include "wavesim/controller.hpp"
#include "wavesim/errors.hpp"

namespace wavesim {

ControllerBank::ControllerBank(const ControllerBank& other) { *this = other; }

ControllerBank& ControllerBank::operator=(const ControllerBank& other) {
  if (this == &other) return *this;
  by_id_.clear();
  by_id_.reserve(other.by_id_.size());
  for (const auto& c : other.by_id_) by_id_.push_back(c ? c->clone() : nullptr);
  return *this;
}

void ControllerBank::assign(int vehicle_id, std::unique_ptr<Controller> controller) {
  if (vehicle_id < 0) throw DomainError("vehicle ids must be non-negative");
  const auto idx = static_cast<std::size_t>(vehicle_id);
  if (by_id_.size() <= idx) by_id_.resize(idx + 1);
  by_id_[idx] = std::move(controller);
}

bool ControllerBank::has(int vehicle_id) const {
  return vehicle_id >= 0 && static_cast<std::size_t>(vehicle_id) < by_id_.size() &&
         by_id_[static_cast<std::size_t>(vehicle_id)] != nullptr;
}

Controller& ControllerBank::at(int vehicle_id) {
  if (!has(vehicle_id)) {
    throw DomainError("no controller for vehicle " + std::to_string(vehicle_id));
  }
  return *by_id_[static_cast<std::size_t>(vehicle_id)];
}

const Controller& ControllerBank::at(int vehicle_id) const {
  if (!has(vehicle_id)) {
    throw DomainError("no controller for vehicle " + std::to_string(vehicle_id));
  }
  return *by_id_[static_cast<std::size_t>(vehicle_id)];
}

IdmController::IdmController(IdmParams params) : params_(params) { params_.validate(); }

ControlOutput IdmController::control(const ControlContext& ctx, std::mt19937_64& rng) {
  return {idm_accel(params_, ctx.v, ctx.v_lead, ctx.gap, rng), WrapperFlag::kPass};
}

std::unique_ptr<Controller> IdmController::clone() const {
  return std::make_unique<IdmController>(*this);
}

FollowerStopperController::FollowerStopperController(FsParams params, double min_accel,
                                                     double max_accel)
    : params_(params), min_accel_(min_accel), max_accel_(max_accel) {
  params_.validate();
}

ControlOutput FollowerStopperController::control(const ControlContext& ctx,
                                                 std::mt19937_64& /*rng*/) {
  const double v_cmd = follower_stopper_cmd(params_, ctx.v, ctx.v_lead, ctx.gap);
  return {std::clamp((v_cmd - ctx.v) / ctx.dt, min_accel_, max_accel_), WrapperFlag::kPass};
}

std::unique_ptr<Controller> FollowerStopperController::clone() const {
  return std::make_unique<FollowerStopperController>(*this);
}

AccController::AccController(AccPlantParams plant, AccSettings initial)
    : plant_(plant), active_(initial) {
  plant_.validate();
  active_.validate();
}

void AccController::request(const AccSettings& settings) {
  settings.validate();
  pending_.push_back({settings, plant_.actuation_delay});
}

const AccSettings& AccController::latest_request() const {
  return pending_.empty() ? active_ : pending_.back().settings;
}

ControlOutput AccController::control(const ControlContext& ctx, std::mt19937_64& /*rng*/) {
  for (auto& p : pending_) --p.wait;
  while (!pending_.empty() && pending_.front().wait < 0) {
    active_ = pending_.front().settings;
    pending_.pop_front();
  }
  return {acc_plant_accel(plant_, active_, ctx.v, ctx.v_lead, ctx.gap, ctx.has_leader),
          WrapperFlag::kPass};
}

std::unique_ptr<Controller> AccController::clone() const {
  return std::make_unique<AccController>(*this);
}

}  // namespace wavesim
