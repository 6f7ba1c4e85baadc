#pragma once

#include <cstddef>
#include <random>

#include "wavesim/controller.hpp"
#include "wavesim/idm.hpp"
#include "wavesim/world.hpp"

namespace wavesim {

inline constexpr double kMinLaneChangeGap = 2.0;

struct LaneChangeStats {
  std::size_t cut_ins = 0;
  std::size_t cut_outs = 0;
  std::size_t skipped = 0;
  std::size_t events() const { return cut_ins + cut_outs; }
};

// Stochastic cut-in / cut-out stand-in. Each follower draws an event with
// probability rate * dt / 3600 per step; events are cut-ins (a new IDM vehicle
// placed mid-gap ahead of it, at the mean of the two neighbours' speeds) or
// cut-outs (the follower leaves) with equal odds. AVs never cut out and no
// event leaves a gap <= kMinLaneChangeGap.
class LaneChangeInjector {
 public:
  LaneChangeInjector(double rate_per_vehicle_hour, IdmParams inserted_params);

  // Returns the number of events applied this call.
  std::size_t apply(WorldState& world, ControllerBank& bank, std::mt19937_64& rng);

  // Single cut-in ahead of vehicles[index]; false if the gap is too small.
  bool cut_in(WorldState& world, ControllerBank& bank, std::size_t index);
  // Removes vehicles[index]; false for the leader or an AV.
  bool cut_out(WorldState& world, std::size_t index);

  const LaneChangeStats& stats() const { return stats_; }
  double rate() const { return rate_; }

 private:
  double rate_;
  IdmParams inserted_params_;
  LaneChangeStats stats_;
};

// Functional form: a copy of `world` after one injection pass.
WorldState inject_lane_change(const WorldState& world, ControllerBank& bank,
                              double rate, std::mt19937_64& rng,
                              const IdmParams& inserted_params = {});

}  // namespace wavesim
