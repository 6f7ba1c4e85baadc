#include "wavesim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "wavesim/errors.hpp"

namespace wavesim {

ControlContext make_context(const WorldState& world, std::size_t index,
                            const SegmentFeed* feed) {
  const auto& self = world.vehicles[index];
  ControlContext ctx;
  ctx.time = world.time;
  ctx.dt = world.dt;
  ctx.position = self.position;
  ctx.v = self.speed;
  ctx.grade = world.grade;
  if (index == 0) {
    ctx.has_leader = false;
    ctx.v_lead = self.speed;
    ctx.gap = kNoLeaderGap;
  } else {
    ctx.has_leader = true;
    ctx.v_lead = world.vehicles[index - 1].speed;
    ctx.gap = world.gap(index);
  }
  if (feed != nullptr) ctx.advice = feed->query(self.position, world.time);
  return ctx;
}

WorldState step(const WorldState& world, ControllerBank& controllers,
                const StepInputs& inputs, std::mt19937_64& rng,
                std::vector<TraceRow>* rows) {
  const double dt = world.dt;
  const std::size_t n = world.vehicles.size();
  if (n == 0) throw DomainError("world has no vehicles");

  WorldState next = world;
  std::vector<double> accel(n, 0.0);
  std::vector<WrapperFlag> flags(n, WrapperFlag::kPass);

  // Leader replays the trajectory.
  const double leader_next = inputs.leader.speed_at(world.time + dt);
  accel[0] = (leader_next - world.vehicles[0].speed) / dt;

  for (std::size_t i = 1; i < n; ++i) {
    const auto& veh = world.vehicles[i];
    auto& controller = controllers.at(veh.id);
    const SegmentFeed* feed = controller.uses_advice() ? inputs.feed : nullptr;
    const ControlContext ctx = make_context(world, i, feed);
    if (!(ctx.gap > 0)) {
      throw CollisionError("vehicle " + std::to_string(veh.id) + " overlaps its leader",
                           veh.id, world.time);
    }
    ControlOutput out = controller.control(ctx, rng);
    if (ctx.gap < kEmergencyGap) {
      out = {kEmergencyBrake, WrapperFlag::kEmergencyBrake};
    }
    accel[i] = out.accel;
    flags[i] = out.flag;
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& veh = next.vehicles[i];
    double a = accel[i];
    double v_new;
    if (i == 0) {
      v_new = leader_next;
    } else {
      v_new = veh.speed + a * dt;
      if (v_new < 0.0) {
        a = -veh.speed / dt;
        v_new = 0.0;
      }
    }
    accel[i] = a;
    veh.accel = a;
    veh.speed = v_new;
    veh.position += v_new * dt;
  }

  if (rows != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& veh = world.vehicles[i];
      const double a_fuel = std::clamp(accel[i], kFuelMinAccel, kFuelMaxAccel);
      const double v_fuel = std::clamp(veh.speed, kFuelMinSpeed, kFuelMaxSpeed);
      rows->push_back({world.time, veh.id, veh.is_av, veh.position, veh.speed, accel[i],
                       i == 0 ? std::numeric_limits<double>::quiet_NaN() : world.gap(i),
                       fuel_rate_gps(inputs.energy, v_fuel, a_fuel, world.grade),
                       flags[i]});
    }
  }

  next.time = world.time + dt;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(next.gap(i) > 0)) {
      throw CollisionError("collision: vehicle " + std::to_string(next.vehicles[i].id) +
                               " at t=" + std::to_string(next.time),
                           next.vehicles[i].id, next.time);
    }
  }
  return next;
}

void ScenarioConfig::validate() const {
  if (n_platoons < 1) throw ConfigError("n_platoons must be >= 1");
  if (humans_per_platoon < 0) throw ConfigError("humans_per_platoon must be >= 0");
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (!(lane_change_rate >= 0)) throw ConfigError("lane_change_rate must be >= 0");
  if (!(vehicle_length > 0)) throw ConfigError("vehicle_length must be positive");
  if (!(duration >= 0)) throw ConfigError("duration must be >= 0");
  idm.validate();
  leader.validate();
  feed.validate();
  energy.validate();
}

double ScenarioConfig::penetration_rate() const {
  return static_cast<double>(n_platoons) /
         static_cast<double>(n_platoons * (1 + humans_per_platoon));
}

int ScenarioConfig::vehicle_count() const {
  return 1 + n_platoons * (1 + humans_per_platoon);
}

WorldState build_platoon(const ScenarioConfig& cfg) {
  WorldState world;
  world.dt = cfg.dt;
  world.time = 0.0;
  world.rng_seed = cfg.seed;
  world.grade = cfg.grade;

  const double v_init = cfg.leader.speed_at(cfg.leader.start_time());
  const double gap = idm_equilibrium_gap(cfg.idm, std::min(v_init, 0.99 * cfg.idm.v0));
  const int count = cfg.vehicle_count();
  // Positions are laid out so the last vehicle starts at x = 0.
  const double spacing = gap + cfg.vehicle_length;
  world.vehicles.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    VehicleState veh;
    veh.id = i;
    veh.position = spacing * static_cast<double>(count - 1 - i);
    veh.speed = v_init;
    veh.length = cfg.vehicle_length;
    veh.is_av = i > 0 && (i - 1) % (1 + cfg.humans_per_platoon) == 0;
    veh.engaged = veh.is_av;
    world.vehicles.push_back(veh);
  }
  return world;
}

ControllerBank build_controllers(const ScenarioConfig& cfg, const WorldState& world) {
  ControllerBank bank;
  for (std::size_t i = 1; i < world.vehicles.size(); ++i) {
    const auto& veh = world.vehicles[i];
    if (veh.is_av) {
      bank.assign(veh.id, make_controller(cfg.av_controller));
    } else {
      bank.assign(veh.id, make_controller(IdmSpec{cfg.idm}));
    }
  }
  return bank;
}

namespace {

// Distinct streams for dynamics noise and lane changes.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint64_t out = 0;
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

}  // namespace

Simulator::Simulator(const ScenarioConfig& cfg)
    : Simulator(cfg, build_platoon(cfg), ControllerBank{}) {
  bank_ = build_controllers(cfg_, world_);
}

Simulator::Simulator(const ScenarioConfig& cfg, WorldState world, ControllerBank bank)
    : cfg_(cfg),
      world_(std::move(world)),
      bank_(std::move(bank)),
      feed_(cfg.feed),
      dynamics_rng_(stream_seed(cfg.seed, 1)),
      lane_rng_(stream_seed(cfg.seed, 2)) {
  cfg_.validate();
  if (cfg_.lane_change_rate > 0) injector_.emplace(cfg_.lane_change_rate, cfg_.idm);
  end_time_ = cfg_.leader.end_time();
  if (cfg_.duration > 0) end_time_ = std::min(end_time_, cfg_.leader.start_time() + cfg_.duration);

  std::vector<double> pos, spd;
  for (const auto& v : world_.vehicles) {
    pos.push_back(v.position);
    spd.push_back(v.speed);
  }
  feed_.record(world_.time, pos, spd);
}

const LaneChangeStats* Simulator::lane_changes() const {
  return injector_ ? &injector_->stats() : nullptr;
}

bool Simulator::done() const { return world_.time + world_.dt > end_time_ + 1e-9; }

ControlContext Simulator::context_for(std::size_t index) const {
  return make_context(world_, index, &feed_);
}

void Simulator::advance(std::vector<TraceRow>* rows) {
  if (injector_) injector_->apply(world_, bank_, lane_rng_);
  world_ = step(world_, bank_, StepInputs{cfg_.leader, cfg_.energy, &feed_}, dynamics_rng_,
                rows);
  std::vector<double> pos, spd;
  pos.reserve(world_.vehicles.size());
  spd.reserve(world_.vehicles.size());
  for (const auto& v : world_.vehicles) {
    pos.push_back(v.position);
    spd.push_back(v.speed);
  }
  feed_.record(world_.time, pos, spd);
}

SimulationTrace run_scenario(const ScenarioConfig& cfg) {
  Simulator sim(cfg);
  SimulationTrace trace;
  trace.dt = cfg.dt;
  trace.rows.reserve(static_cast<std::size_t>(cfg.vehicle_count()) *
                     static_cast<std::size_t>(cfg.leader.duration() / cfg.dt + 1));
  try {
    while (!sim.done()) {
      sim.advance(&trace.rows);
      ++trace.steps;
    }
  } catch (const CollisionError& e) {
    trace.aborted = true;
    trace.abort_reason = e.what();
  }
  if (const auto* lc = sim.lane_changes()) trace.lane_change_events = lc->events();
  return trace;
}

}  // namespace wavesim
