#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "wavesim/acc_plant.hpp"
#include "wavesim/energy.hpp"
#include "wavesim/idm.hpp"
#include "wavesim/policy.hpp"
#include "wavesim/reward.hpp"
#include "wavesim/trajectory.hpp"
#include "wavesim/wrappers.hpp"

namespace wavesim {

// Single-platoon training episodes: one AV directly behind the trajectory
// leader followed by IDM humans. The AV drives as a human during warm-up so
// the segment feed is populated, then the policy takes over.
struct EnvConfig {
  PolicyVariant variant = PolicyVariant::kAccel;
  int humans = 19;
  TrajectoryKind kind = TrajectoryKind::kShockwave;
  std::uint64_t trajectory_seed_base = 0;
  int trajectory_pool = 16;
  double warmup = 240.0;  // [s]
  int horizon = 3000;     // engaged steps per episode
  IdmParams idm;
  AccPlantParams plant;
  ClosingSpeedCoefficients closing;
  AccelRewardCoefficients accel_reward;
  AccRewardCoefficients acc_reward;
  double collision_penalty = 100.0;
  bool constant_reward = false;  // reward 1 per step, for return accounting checks
  double aux_scale = 0.2;        // critic input = aux_scale * platoon-mean fuel [g/s]
  void validate() const;
};

struct Episode {
  std::vector<Eigen::VectorXd> obs;
  std::vector<double> aux;
  std::vector<PolicyAction> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  bool terminal = false;  // ended by a collision
  Eigen::VectorXd final_obs;
  double final_aux = 0.0;
  std::uint64_t trajectory_seed = 0;
  double distance = 0.0;  // followers, engaged phase [m]
  double fuel = 0.0;      // followers, engaged phase [g]
  double total_reward() const;
  double system_mpg() const;
};

class PlatoonEnv {
 public:
  explicit PlatoonEnv(EnvConfig cfg);
  const EnvConfig& config() const { return cfg_; }

  // Runs one episode. Actions are sampled from the policy when `stochastic`,
  // otherwise the policy mode is used.
  Episode run_episode(const Policy& policy, std::mt19937_64& rng, bool stochastic = true);

 private:
  const LeaderTrajectory& trajectory(std::uint64_t seed);

  EnvConfig cfg_;
  EnergyModel energy_ = default_energy_model();
  std::map<std::uint64_t, LeaderTrajectory> cache_;
};

}  // namespace wavesim
