#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wavesim/builtin_controllers.hpp"
#include "wavesim/errors.hpp"
#include "wavesim/lane_change.hpp"
#include "wavesim/simulator.hpp"
#include "wavesim/trace.hpp"
#include "wavesim/trajectory.hpp"

using namespace wavesim;

namespace {

class ConstantAccel final : public Controller {
 public:
  explicit ConstantAccel(double a) : a_(a) {}
  ControlOutput control(const ControlContext&, std::mt19937_64&) override { return {a_}; }
  std::unique_ptr<Controller> clone() const override {
    return std::make_unique<ConstantAccel>(*this);
  }
  const char* name() const override { return "constant"; }

 private:
  double a_;
};

// Leader at x = 1000 and one follower `gap` metres behind its bumper.
WorldState pair_world(double v_leader, double v_follower, double gap) {
  WorldState w;
  VehicleState lead;
  lead.id = 0;
  lead.position = 1000.0;
  lead.speed = v_leader;
  VehicleState f;
  f.id = 1;
  f.position = 1000.0 - lead.length - gap;
  f.speed = v_follower;
  w.vehicles = {lead, f};
  return w;
}

double amplitude(const SimulationTrace& trace, int id) {
  double lo = 1e9, hi = -1e9;
  for (const auto& r : trace.rows) {
    if (r.veh_id != id) continue;
    lo = std::min(lo, r.speed);
    hi = std::max(hi, r.speed);
  }
  return hi - lo;
}

}  // namespace

TEST(Step, EquilibriumFollowerStaysPut) {
  IdmParams p;
  const double v = 25.0;
  const double s = idm_equilibrium_gap(p, v);
  WorldState w = pair_world(v, v, s);
  ControllerBank bank;
  bank.assign(1, std::make_unique<IdmController>(p));
  const auto leader = constant_trajectory(v, 100.0);
  std::mt19937_64 rng(0);
  std::vector<TraceRow> rows;
  WorldState next = step(w, bank, {leader, default_energy_model()}, rng, &rows);
  EXPECT_LT(std::abs(rows[1].accel), 1e-9);
  EXPECT_NEAR(next.gap(1), s, 1e-6);
}

TEST(Step, FreeRoadFollowerAccelerates) {
  WorldState w = pair_world(30.0, 30.0, 1e6);
  ControllerBank bank;
  bank.assign(1, std::make_unique<IdmController>(IdmParams{}));
  const auto leader = constant_trajectory(30.0, 100.0);
  std::mt19937_64 rng(0);
  std::vector<TraceRow> rows;
  step(w, bank, {leader, default_energy_model()}, rng, &rows);
  EXPECT_NEAR(rows[1].accel, 1.3 * (1.0 - std::pow(30.0 / 35.0, 4)), 1e-6);
}

TEST(Step, EulerArithmetic) {
  WorldState w = pair_world(0.0, 10.0, 5000.0);
  ControllerBank bank;
  bank.assign(1, std::make_unique<ConstantAccel>(-3.0));
  const auto leader = constant_trajectory(0.0, 100.0);
  std::mt19937_64 rng(0);
  const double x0 = w.vehicles[1].position;
  WorldState next = step(w, bank, {leader, default_energy_model()}, rng);
  EXPECT_NEAR(next.vehicles[1].speed, 9.7, 1e-12);
  EXPECT_NEAR(next.vehicles[1].position - x0, 0.97, 1e-12);
}

TEST(Step, SpeedClampedAtZero) {
  WorldState w = pair_world(0.0, 0.2, 5000.0);
  ControllerBank bank;
  bank.assign(1, std::make_unique<ConstantAccel>(-3.0));
  const auto leader = constant_trajectory(0.0, 100.0);
  std::mt19937_64 rng(0);
  std::vector<TraceRow> rows;
  WorldState next = step(w, bank, {leader, default_energy_model()}, rng, &rows);
  EXPECT_EQ(next.vehicles[1].speed, 0.0);
  EXPECT_NEAR(rows[1].accel, -2.0, 1e-12);
}

TEST(Step, EmergencyBrakeBelowOneMetre) {
  WorldState w = pair_world(5.0, 5.0, 0.9);
  ControllerBank bank;
  bank.assign(1, std::make_unique<ConstantAccel>(1.0));
  const auto leader = constant_trajectory(5.0, 100.0);
  std::mt19937_64 rng(0);
  std::vector<TraceRow> rows;
  step(w, bank, {leader, default_energy_model()}, rng, &rows);
  EXPECT_EQ(rows[1].accel, kEmergencyBrake);
  EXPECT_EQ(rows[1].flag, WrapperFlag::kEmergencyBrake);
}

TEST(Step, CollisionRaises) {
  WorldState w = pair_world(0.0, 20.0, 1.5);
  ControllerBank bank;
  bank.assign(1, std::make_unique<ConstantAccel>(1.5));
  const auto leader = constant_trajectory(0.0, 100.0);
  std::mt19937_64 rng(0);
  EXPECT_THROW(step(w, bank, {leader, default_energy_model()}, rng), CollisionError);
}

TEST(Step, ExhaustedTrajectory) {
  WorldState w = pair_world(10.0, 10.0, 50.0);
  w.time = 100.0;
  ControllerBank bank;
  bank.assign(1, std::make_unique<IdmController>(IdmParams{}));
  const auto leader = constant_trajectory(10.0, 100.0);
  std::mt19937_64 rng(0);
  EXPECT_THROW(step(w, bank, {leader, default_energy_model()}, rng), TrajectoryExhausted);
}

TEST(RunScenario, PureIdmConvergesBehindConstantLeader) {
  ScenarioConfig cfg;
  cfg.leader = constant_trajectory(30.0, 60.0);
  SimulationTrace trace = run_scenario(cfg);
  ASSERT_FALSE(trace.aborted);
  const double t_last = trace.rows.back().t;
  for (const auto& r : trace.rows) {
    if (r.t == t_last) EXPECT_NEAR(r.speed, 30.0, 0.1) << r.veh_id;
  }
}

TEST(RunScenario, ConvergesFromPerturbedStart) {
  ScenarioConfig cfg;
  cfg.leader = constant_trajectory(30.0, 400.0);
  WorldState w = build_platoon(cfg);
  for (std::size_t i = 1; i < w.vehicles.size(); ++i) w.vehicles[i].speed = 26.0;
  Simulator sim(cfg, w, build_controllers(cfg, w));
  while (!sim.done()) sim.advance();
  for (const auto& v : sim.world().vehicles) EXPECT_NEAR(v.speed, 30.0, 0.1) << v.id;
}

TEST(RunScenario, TenPlatoonLayout) {
  ScenarioConfig cfg;
  cfg.n_platoons = 10;
  cfg.humans_per_platoon = 19;
  cfg.leader = constant_trajectory(20.0, 1.0);
  EXPECT_EQ(cfg.vehicle_count(), 201);
  EXPECT_DOUBLE_EQ(cfg.penetration_rate(), 0.05);
  SimulationTrace trace = run_scenario(cfg);
  std::map<int, bool> av;
  for (const auto& r : trace.rows) av[r.veh_id] = r.is_av;
  ASSERT_EQ(av.size(), 201u);
  for (const auto& [id, is_av] : av) EXPECT_EQ(is_av, id > 0 && (id - 1) % 20 == 0) << id;
}

TEST(RunScenario, Deterministic) {
  ScenarioConfig cfg;
  cfg.idm.noise_sigma = 0.1;
  cfg.lane_change_rate = 20.0;
  cfg.leader = synth_trajectory(TrajectoryKind::kShockwave, 120.0, 4);
  cfg.seed = 17;
  std::ostringstream a, b;
  write_trace_csv(a, run_scenario(cfg));
  write_trace_csv(b, run_scenario(cfg));
  EXPECT_EQ(a.str(), b.str());
  cfg.seed = 18;
  std::ostringstream c;
  write_trace_csv(c, run_scenario(cfg));
  EXPECT_NE(a.str(), c.str());
}

TEST(RunScenario, TraceInvariants) {
  ScenarioConfig cfg;
  cfg.n_platoons = 3;
  cfg.humans_per_platoon = 9;
  cfg.av_controller = FollowerStopperSpec{};
  cfg.idm.noise_sigma = 0.1;
  cfg.leader = synth_trajectory(TrajectoryKind::kShockwave, 300.0, 2);
  SimulationTrace trace = run_scenario(cfg);
  ASSERT_FALSE(trace.aborted);
  std::map<int, const TraceRow*> prev;
  for (const auto& r : trace.rows) {
    if (r.veh_id != 0) EXPECT_GT(r.gap, 0.0);
    EXPECT_GE(r.speed, 0.0);
    if (r.is_av) EXPECT_LE(r.speed, kSpeedLimit);
    auto it = prev.find(r.veh_id);
    if (it != prev.end() && r.veh_id != 0) {
      EXPECT_NEAR(r.speed - it->second->speed, it->second->accel * trace.dt, 1e-12);
    }
    prev[r.veh_id] = &r;
  }
}

TEST(RunScenario, AbortKeepsPartialTrace) {
  ScenarioConfig cfg;
  cfg.humans_per_platoon = 3;
  cfg.av_controller = IdmSpec{IdmParams{35.0, 0.1, 4.0, 0.1, 4.0, 0.1}};
  cfg.leader = synth_trajectory(TrajectoryKind::kShockwave, 300.0, 1);
  SimulationTrace trace = run_scenario(cfg);
  if (trace.aborted) {
    EXPECT_FALSE(trace.rows.empty());
    EXPECT_FALSE(trace.abort_reason.empty());
  }
}

TEST(StringInstability, DipAmplifiesUpstream) {
  ScenarioConfig cfg;
  cfg.humans_per_platoon = 24;
  cfg.leader = dip_trajectory(10.0, 5.0, 200.0);
  SimulationTrace trace = run_scenario(cfg);
  ASSERT_FALSE(trace.aborted);
  EXPECT_GT(amplitude(trace, 25), amplitude(trace, 5));
}

TEST(Trajectory, SynthContracts) {
  const auto ff = synth_trajectory(TrajectoryKind::kFreeflow, 300.0, 3);
  EXPECT_GE(*std::min_element(ff.speeds.begin(), ff.speeds.end()), 28.0);
  const auto sw = synth_trajectory(TrajectoryKind::kShockwave, 600.0, 3);
  EXPECT_EQ(*std::min_element(sw.speeds.begin(), sw.speeds.end()), 0.0);
  EXPECT_GE(*std::max_element(sw.speeds.begin(), sw.speeds.end()), 22.0);

  const auto bn = synth_trajectory(TrajectoryKind::kBottleneck, 600.0, 3);
  bool plateau = false;
  const std::size_t w = 600;
  for (std::size_t i = 0; i + w <= bn.speeds.size() && !plateau; i += 10) {
    double sum = 0.0, lo = 1e9, hi = -1e9;
    for (std::size_t k = i; k < i + w; ++k) {
      sum += bn.speeds[k];
      lo = std::min(lo, bn.speeds[k]);
      hi = std::max(hi, bn.speeds[k]);
    }
    plateau = std::abs(sum / w - 5.0) <= 1.0 && lo >= 3.0 && hi <= 7.0;
  }
  EXPECT_TRUE(plateau);
}

TEST(Trajectory, UniformGridAndBounds) {
  for (auto kind : {TrajectoryKind::kFreeflow, TrajectoryKind::kShockwave,
                    TrajectoryKind::kBottleneck}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto t = synth_trajectory(kind, 400.0, seed);
      EXPECT_NO_THROW(t.validate());
      for (std::size_t i = 0; i < t.times.size(); ++i) {
        EXPECT_NEAR(t.times[i], 0.1 * static_cast<double>(i), 1e-9);
        EXPECT_GE(t.speeds[i], 0.0);
        EXPECT_LE(t.speeds[i], kMaxLeaderSpeed);
      }
    }
  }
  EXPECT_THROW(synth_trajectory(TrajectoryKind::kFreeflow, 59.0, 0), DomainError);
  EXPECT_THROW(parse_trajectory_kind("ring"), ConfigError);
}

TEST(Trajectory, CsvResamplesLinearly) {
  std::istringstream in("time_s,speed_mps\n0,10\n1,20\n2,20\n");
  const auto t = read_trajectory_csv(in);
  ASSERT_EQ(t.times.size(), 21u);
  EXPECT_NEAR(t.speeds[5], 15.0, 1e-12);
  EXPECT_NEAR(t.speed_at(0.25), 12.5, 1e-12);
  EXPECT_THROW(t.speed_at(2.5), TrajectoryExhausted);

  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream back(out.str());
  const auto u = read_trajectory_csv(back);
  EXPECT_EQ(u.speeds, t.speeds);
}

TEST(Trajectory, CsvRejectsBadInput) {
  std::istringstream nonmono("time_s,speed_mps\n0,10\n0,12\n");
  EXPECT_ANY_THROW(read_trajectory_csv(nonmono));
  std::istringstream fast("time_s,speed_mps\n0,10\n1,50\n");
  EXPECT_ANY_THROW(read_trajectory_csv(fast));
  EXPECT_THROW(load_trajectory_csv("/nonexistent/traj.csv"), MissingFile);
}

TEST(LaneChange, ZeroRateLeavesWorldUnchanged) {
  ScenarioConfig cfg;
  cfg.leader = constant_trajectory(20.0, 10.0);
  WorldState w = build_platoon(cfg);
  ControllerBank bank = build_controllers(cfg, w);
  std::mt19937_64 rng(0);
  WorldState out = inject_lane_change(w, bank, 0.0, rng);
  ASSERT_EQ(out.vehicles.size(), w.vehicles.size());
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    EXPECT_EQ(out.vehicles[i].position, w.vehicles[i].position);
    EXPECT_EQ(out.vehicles[i].speed, w.vehicles[i].speed);
  }
}

TEST(LaneChange, CutInConservesSpace) {
  WorldState w = pair_world(20.0, 20.0, 100.0);
  ControllerBank bank;
  bank.assign(1, std::make_unique<IdmController>(IdmParams{}));
  LaneChangeInjector inj(1.0, IdmParams{});
  ASSERT_TRUE(inj.cut_in(w, bank, 1));
  ASSERT_EQ(w.vehicles.size(), 3u);
  EXPECT_GE(w.gap(1), kMinLaneChangeGap);
  EXPECT_GE(w.gap(2), kMinLaneChangeGap);
  EXPECT_NEAR(w.gap(1) + w.gap(2), 100.0 - w.vehicles[1].length, 1e-9);
  EXPECT_TRUE(bank.has(w.vehicles[1].id));
  EXPECT_FALSE(w.vehicles[1].is_av);
}

TEST(LaneChange, RefusesTightGapAndAvCutOut) {
  WorldState w = pair_world(20.0, 20.0, 8.0);
  ControllerBank bank;
  bank.assign(1, std::make_unique<IdmController>(IdmParams{}));
  LaneChangeInjector inj(1.0, IdmParams{});
  EXPECT_FALSE(inj.cut_in(w, bank, 1));
  w.vehicles[1].is_av = true;
  EXPECT_FALSE(inj.cut_out(w, 1));
  EXPECT_FALSE(inj.cut_out(w, 0));
  w.vehicles[1].is_av = false;
  EXPECT_TRUE(inj.cut_out(w, 1));
  EXPECT_EQ(w.vehicles.size(), 1u);
}

TEST(LaneChange, PoissonEventCount) {
  ScenarioConfig cfg;
  cfg.humans_per_platoon = 19;
  cfg.lane_change_rate = 6.0;
  cfg.leader = constant_trajectory(25.0, 3600.0);
  cfg.seed = 42;
  Simulator sim(cfg);
  while (!sim.done()) sim.advance();
  const double events = static_cast<double>(sim.lane_changes()->events());
  EXPECT_NEAR(events, 120.0, 3.0 * std::sqrt(120.0));
}

TEST(LaneChange, NeverLeavesTinyGaps) {
  ScenarioConfig cfg;
  cfg.humans_per_platoon = 19;
  cfg.lane_change_rate = 200.0;
  cfg.leader = synth_trajectory(TrajectoryKind::kShockwave, 300.0, 9);
  cfg.seed = 5;
  SimulationTrace trace = run_scenario(cfg);
  EXPECT_GT(trace.lane_change_events, 0u);
  for (const auto& r : trace.rows) {
    if (r.veh_id != 0) EXPECT_GT(r.gap, 0.0);
  }
}

TEST(TraceCsv, RoundTrip) {
  ScenarioConfig cfg;
  cfg.humans_per_platoon = 4;
  cfg.leader = synth_trajectory(TrajectoryKind::kShockwave, 60.0, 0);
  const SimulationTrace t = run_scenario(cfg);
  std::ostringstream a;
  write_trace_csv(a, t);
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), kTraceCsvHeader);
  std::istringstream in(a.str());
  const SimulationTrace u = read_trace_csv(in);
  std::ostringstream b;
  write_trace_csv(b, u);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(format_double(0.1), "0.1");
}
