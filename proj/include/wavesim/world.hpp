#pragma once

#include <cstdint>
#include <vector>

namespace wavesim {

inline constexpr double kDefaultVehicleLength = 5.0;

struct VehicleState {
  int id = 0;
  double position = 0.0;  // [m], increasing downstream
  double speed = 0.0;     // [m/s]
  double accel = 0.0;     // last applied [m/s^2]
  double length = kDefaultVehicleLength;
  bool is_av = false;
  bool engaged = false;
};

// Vehicles are ordered front to back; index 0 is the trajectory leader.
struct WorldState {
  double time = 0.0;
  double dt = 0.1;
  std::vector<VehicleState> vehicles;
  std::uint64_t rng_seed = 0;
  double grade = 0.0;

  // Bumper-to-bumper gap of vehicles[index] to vehicles[index - 1].
  double gap(std::size_t index) const;
  int next_vehicle_id() const;
};

}  // namespace wavesim
