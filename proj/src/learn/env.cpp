#include "wavesim/env.hpp"

#include <numeric>

#include "wavesim/errors.hpp"
#include "wavesim/rl_controllers.hpp"
#include "wavesim/simulator.hpp"
#include "wavesim/units.hpp"

namespace wavesim {

void EnvConfig::validate() const {
  if (humans < 0) throw ConfigError("env humans must be >= 0");
  if (trajectory_pool < 1) throw ConfigError("env trajectory_pool must be >= 1");
  if (!(warmup >= 0)) throw ConfigError("env warmup must be >= 0");
  if (horizon < 1) throw ConfigError("env horizon must be >= 1");
  if (!(collision_penalty >= 0)) throw ConfigError("env collision_penalty must be >= 0");
  idm.validate();
  plant.validate();
  accel_reward.validate();
  acc_reward.validate();
}

double Episode::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

double Episode::system_mpg() const {
  return mpg_from_grams(distance, fuel);
}

PlatoonEnv::PlatoonEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

const LeaderTrajectory& PlatoonEnv::trajectory(std::uint64_t seed) {
  auto it = cache_.find(seed);
  if (it == cache_.end()) {
    const double duration = cfg_.warmup + cfg_.horizon * 0.1 + 1.0;
    it = cache_.emplace(seed, synth_trajectory(cfg_.kind, std::max(60.0, duration), seed)).first;
  }
  return it->second;
}

Episode PlatoonEnv::run_episode(const Policy& policy, std::mt19937_64& rng, bool stochastic) {
  if (policy.variant() != cfg_.variant) throw ConfigError("policy variant does not match env");
  Episode ep;
  std::uniform_int_distribution<int> pick(0, cfg_.trajectory_pool - 1);
  ep.trajectory_seed = cfg_.trajectory_seed_base + static_cast<std::uint64_t>(pick(rng));

  ScenarioConfig sc;
  sc.n_platoons = 1;
  sc.humans_per_platoon = cfg_.humans;
  sc.idm = cfg_.idm;
  sc.leader = trajectory(ep.trajectory_seed);
  sc.seed = rng();
  sc.energy = energy_;

  // Train against a non-owning handle; the controller never outlives this call.
  const std::shared_ptr<const Policy> handle(&policy, [](const Policy*) {});
  WorldState world = build_platoon(sc);
  ControllerBank bank = build_controllers(sc, world);
  const int av_id = world.vehicles[1].id;
  const bool acc = is_acc_variant(cfg_.variant);
  if (acc) {
    const bool low = cfg_.variant == PolicyVariant::kAccLow;
    bank.assign(av_id, std::make_unique<RlAccController>(low ? handle : nullptr,
                                                         low ? nullptr : handle, cfg_.plant));
  } else {
    bank.assign(av_id, std::make_unique<RlAccelController>(handle, cfg_.closing, cfg_.idm));
  }
  Simulator sim(sc, std::move(world), std::move(bank));

  auto set_engaged = [&](bool on) {
    Controller& c = sim.controllers().at(av_id);
    if (acc) {
      static_cast<RlAccController&>(c).set_engaged(on);
    } else {
      static_cast<RlAccelController&>(c).set_engaged(on);
    }
  };
  auto set_source = [&](ActionSource src) {
    Controller& c = sim.controllers().at(av_id);
    if (acc) {
      static_cast<RlAccController&>(c).set_action_source(std::move(src));
    } else {
      static_cast<RlAccelController&>(c).set_action_source(std::move(src));
    }
  };

  std::vector<TraceRow> rows;
  double last_aux = 0.0;
  auto follower_fuel = [&](std::vector<double>& rates) {
    rates.clear();
    for (const auto& r : rows) {
      if (r.veh_id != 0) rates.push_back(r.fuel);
    }
  };

  set_engaged(false);
  const int warm_steps = static_cast<int>(std::lround(cfg_.warmup / sc.dt));
  std::vector<double> rates;
  for (int k = 0; k < warm_steps && !sim.done(); ++k) {
    rows.clear();
    sim.advance(&rows);
  }
  follower_fuel(rates);
  if (!rates.empty()) {
    last_aux = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  }

  set_engaged(true);
  set_source([&](const Policy& p, const Eigen::VectorXd& obs) {
    const PolicyOutput out = p.forward(obs);
    const PolicyAction a = stochastic ? p.sample(out, rng) : p.mode(out);
    ep.obs.push_back(obs);
    ep.aux.push_back(cfg_.aux_scale * last_aux);
    ep.actions.push_back(a);
    ep.log_probs.push_back(p.log_prob(out, a));
    return a;
  });

  const double dt = sc.dt;
  for (int k = 0; k < cfg_.horizon && !sim.done(); ++k) {
    rows.clear();
    try {
      sim.advance(&rows);
    } catch (const CollisionError&) {
      ep.terminal = true;
      if (ep.rewards.size() < ep.actions.size()) {
        ep.rewards.push_back(cfg_.constant_reward ? 1.0 : -cfg_.collision_penalty);
      }
      break;
    }
    follower_fuel(rates);
    const double mean_fuel =
        std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
    for (const auto& r : rows) {
      if (r.veh_id == 0) continue;
      ep.distance += (r.speed + r.accel * dt) * dt;
      ep.fuel += r.fuel * dt;
    }

    const auto& w = sim.world();
    const double v = w.vehicles[1].speed;
    const double vl = w.vehicles[0].speed;
    const double h = w.gap(1);
    const double a = w.vehicles[1].accel;
    const double h_min = failsafe_threshold(v, vl, cfg_.closing);
    const double h_max = gap_closing_threshold(v);
    double r;
    if (cfg_.constant_reward) {
      r = 1.0;
    } else if (acc) {
      const double v_sp = sim.feed().query(w.vehicles[1].position, w.time).v_sp;
      r = reward_acc(cfg_.acc_reward, a, v, v_sp, rates, h, h_min, h_max);
    } else {
      r = reward_accel(cfg_.accel_reward, rates, a, h, v, h_min, h_max);
    }
    ep.rewards.push_back(r);
    last_aux = mean_fuel;
  }

  if (!ep.terminal) {
    const ControlContext ctx = sim.context_for(1);
    const Controller& c = sim.controllers().at(av_id);
    if (acc) {
      const auto& rc = static_cast<const RlAccController&>(c);
      ep.final_obs = rc.observe(ctx, rc.policy_for(ctx.v));
    } else {
      ep.final_obs = static_cast<const RlAccelController&>(c).observe(ctx);
    }
    ep.final_aux = cfg_.aux_scale * last_aux;
  }
  return ep;
}

}  // namespace wavesim
