#include "wavesim/lane_change.hpp"

#include "wavesim/builtin_controllers.hpp"
#include "wavesim/errors.hpp"

namespace wavesim {

LaneChangeInjector::LaneChangeInjector(double rate_per_vehicle_hour,
                                       IdmParams inserted_params)
    : rate_(rate_per_vehicle_hour), inserted_params_(inserted_params) {
  if (!(rate_ >= 0)) throw DomainError("lane-change rate must be >= 0");
}

bool LaneChangeInjector::cut_in(WorldState& world, ControllerBank& bank,
                                std::size_t index) {
  if (index == 0 || index >= world.vehicles.size()) return false;
  const auto& front = world.vehicles[index - 1];
  const auto& back = world.vehicles[index];
  const double gap = world.gap(index);
  const double length = kDefaultVehicleLength;
  const double half = 0.5 * (gap - length);
  if (!(half > kMinLaneChangeGap)) return false;

  VehicleState car;
  car.id = world.next_vehicle_id();
  car.length = length;
  car.position = back.position + half + length;
  car.speed = 0.5 * (front.speed + back.speed);
  car.accel = 0.0;
  bank.assign(car.id, std::make_unique<IdmController>(inserted_params_));
  world.vehicles.insert(world.vehicles.begin() + static_cast<std::ptrdiff_t>(index), car);
  return true;
}

bool LaneChangeInjector::cut_out(WorldState& world, std::size_t index) {
  if (index == 0 || index >= world.vehicles.size()) return false;
  if (world.vehicles[index].is_av) return false;
  world.vehicles.erase(world.vehicles.begin() + static_cast<std::ptrdiff_t>(index));
  return true;
}

std::size_t LaneChangeInjector::apply(WorldState& world, ControllerBank& bank,
                                      std::mt19937_64& rng) {
  if (rate_ == 0.0) return 0;
  const double p = rate_ * world.dt / 3600.0;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Draw per follower id so rows inserted this pass are not revisited.
  std::vector<int> ids;
  ids.reserve(world.vehicles.size());
  for (std::size_t i = 1; i < world.vehicles.size(); ++i) ids.push_back(world.vehicles[i].id);

  std::size_t applied = 0;
  for (int id : ids) {
    if (u01(rng) >= p) continue;
    const bool is_cut_in = u01(rng) < 0.5;
    std::size_t index = 0;
    for (std::size_t i = 1; i < world.vehicles.size(); ++i) {
      if (world.vehicles[i].id == id) index = i;
    }
    if (index == 0) continue;
    const bool ok = is_cut_in ? cut_in(world, bank, index) : cut_out(world, index);
    if (!ok) {
      ++stats_.skipped;
      continue;
    }
    ++applied;
    if (is_cut_in) {
      ++stats_.cut_ins;
    } else {
      ++stats_.cut_outs;
    }
  }
  return applied;
}

WorldState inject_lane_change(const WorldState& world, ControllerBank& bank, double rate,
                              std::mt19937_64& rng, const IdmParams& inserted_params) {
  WorldState out = world;
  LaneChangeInjector injector(rate, inserted_params);
  injector.apply(out, bank, rng);
  return out;
}

}  // namespace wavesim
