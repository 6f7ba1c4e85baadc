#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "wavesim/controller.hpp"
#include "wavesim/controller_spec.hpp"
#include "wavesim/energy.hpp"
#include "wavesim/idm.hpp"
#include "wavesim/lane_change.hpp"
#include "wavesim/speed_planner.hpp"
#include "wavesim/trace.hpp"
#include "wavesim/trajectory.hpp"
#include "wavesim/world.hpp"

namespace wavesim {

inline constexpr double kEmergencyGap = 1.0;     // [m]
inline constexpr double kEmergencyBrake = -6.0;  // [m/s^2]

struct StepInputs {
  const LeaderTrajectory& leader;
  const EnergyModel& energy;
  const SegmentFeed* feed = nullptr;  // advice source for controllers that use it
};

// Advances the world by one dt. Followers compute accelerations from the
// pre-step state (synchronous update); any follower with gap < 1 m is forced
// to brake at -6 m/s^2. Speeds use forward Euler clamped at zero and positions
// advance with the post-step speed. The leader's speed is read from the
// trajectory at t + dt.
//
// Appends one row per vehicle to `rows` when non-null. Throws
// TrajectoryExhausted when the leader data ends and CollisionError when any
// post-step gap is <= 0.
WorldState step(const WorldState& world, ControllerBank& controllers,
                const StepInputs& inputs, std::mt19937_64& rng,
                std::vector<TraceRow>* rows = nullptr);

ControlContext make_context(const WorldState& world, std::size_t index,
                            const SegmentFeed* feed);

struct ScenarioConfig {
  int n_platoons = 1;
  int humans_per_platoon = 19;
  ControllerSpec av_controller = IdmSpec{};
  LeaderTrajectory leader;
  IdmParams idm;
  double lane_change_rate = 0.0;  // events / vehicle / hour
  std::uint64_t seed = 0;
  double dt = 0.1;
  double vehicle_length = kDefaultVehicleLength;
  double grade = 0.0;
  double duration = 0.0;  // 0: run until the trajectory ends
  SegmentFeedParams feed;
  EnergyModel energy = default_energy_model();

  void validate() const;
  double penetration_rate() const;
  int vehicle_count() const;  // including the leader
};

// Initial platoon: every vehicle at the leader's starting speed, spaced at the
// IDM equilibrium gap for that speed.
WorldState build_platoon(const ScenarioConfig& cfg);
ControllerBank build_controllers(const ScenarioConfig& cfg, const WorldState& world);

// Stateful wrapper around step() that owns the world, controllers, feed and
// RNG streams of one episode.
class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& cfg);
  Simulator(const ScenarioConfig& cfg, WorldState world, ControllerBank bank);

  const WorldState& world() const { return world_; }
  ControllerBank& controllers() { return bank_; }
  const SegmentFeed& feed() const { return feed_; }
  const ScenarioConfig& config() const { return cfg_; }
  const LaneChangeStats* lane_changes() const;

  bool done() const;  // trajectory (or configured duration) exhausted
  // Runs lane-change injection (if enabled) and one step().
  void advance(std::vector<TraceRow>* rows = nullptr);

  ControlContext context_for(std::size_t index) const;

 private:
  ScenarioConfig cfg_;
  WorldState world_;
  ControllerBank bank_;
  SegmentFeed feed_;
  std::mt19937_64 dynamics_rng_;
  std::mt19937_64 lane_rng_;
  std::optional<LaneChangeInjector> injector_;
  double end_time_;
};

// Full run; on CollisionError the partial trace is returned flagged aborted.
// Deterministic in (cfg, cfg.seed).
SimulationTrace run_scenario(const ScenarioConfig& cfg);

}  // namespace wavesim
