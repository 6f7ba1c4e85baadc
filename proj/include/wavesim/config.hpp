#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wavesim/simulator.hpp"
#include "wavesim/train.hpp"

namespace wavesim {

// Flat `key = value` file. `#` starts a comment; blank lines are ignored.
// Relative paths in values resolve against base_dir().
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(std::istream& is, std::string base_dir = ".");
  static KeyValueConfig from_string(const std::string& text, std::string base_dir = ".");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string resolve_path(const std::string& value) const;

  const std::string& base_dir() const { return base_dir_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  // Sorted `key = value` lines; hash() fingerprints this text.
  std::string canonical() const;
  std::uint64_t hash() const;

  // Keys present in the file but never read.
  std::vector<std::string> unused_keys() const;
  // Throws ConfigError naming every unused key.
  void reject_unknown() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
  std::string base_dir_ = ".";
};

// Scenario keys (defaults in parentheses):
//   n_platoons (1), humans_per_platoon (19) or penetration, seed (0), dt (0.1),
//   duration (0 = whole trajectory), lane_change_rate (0), vehicle_length (5), grade (0)
//   trajectory.kind (shockwave) | trajectory.file, trajectory.duration (600),
//   trajectory.seed (seed)
//   idm.v0 idm.T idm.a idm.b idm.delta idm.s0 idm.noise_sigma
//   av = idm | follower_stopper | stock_acc | rl_accel | rl_acc   (idm)
//   fs.v_des (auto = mean leader speed), fs.dx0_1..3, fs.d_1..3, fs.min_accel, fs.max_accel
//   acc.k_gap acc.k_speed acc.k_free acc.delay acc.speed_mph (73) acc.gap_bars (2)
//   policy (rl_accel, or rl_acc at all speeds), policy.low, policy.high, switch_mph (60)
//   closing.gain (4/30), closing.offset (1)
//   feed.segment_length (650) feed.window (60) feed.latency (180) feed.max_headway_flag (false)
//   energy.model (built-in default)
ScenarioConfig scenario_from_config(const KeyValueConfig& kv);

// Training keys: train.variant (accel), train.iterations (200), train.episodes (2),
// train.horizon (3000), train.warmup (240), train.humans (19), train.kind (shockwave),
// train.trajectory_seed_base (0), train.pool (16), train.gamma (0.99),
// train.lambda (0.95), train.reward_scale (0.05), train.seed (0),
// train.constant_reward (false), ppo.clip (0.2), ppo.actor_lr (3e-4),
// ppo.critic_lr (1e-3), ppo.epochs (5), ppo.minibatch (500), ppo.entropy (0),
// ppo.max_grad_norm (0.5), policy.hidden (64), policy.layers (2),
// policy.init_log_std (-0.5), reward.c1..c4 (variant defaults), switch_mph (60),
// idm.*, closing.*, acc.* as for scenarios
TrainConfig train_from_config(const KeyValueConfig& kv);

// Controller named by `av` plus its keys.
ControllerSpec controller_from_config(const KeyValueConfig& kv, const LeaderTrajectory& leader);

}  // namespace wavesim
