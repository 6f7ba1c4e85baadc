#include "wavesim/config.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "wavesim/errors.hpp"
#include "wavesim/hash.hpp"
#include "wavesim/policy.hpp"

namespace wavesim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is, std::string base_dir) {
  KeyValueConfig kv;
  kv.base_dir_ = std::move(base_dir);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (kv.values_.count(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text, std::string base_dir) {
  std::istringstream ss(text);
  return parse(ss, std::move(base_dir));
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open config file '" + path + "'");
  std::string dir = std::filesystem::path(path).parent_path().string();
  if (dir.empty()) dir = ".";
  return parse(in, dir);
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::erase(const std::string& key) {
  values_.erase(key);
  used_.erase(key);
}

const std::string* KeyValueConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
    throw ConfigError("config key '" + key + "': '" + *v + "' is not a number");
  }
  return out;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  long out = 0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
    throw ConfigError("config key '" + key + "': '" + *v + "' is not an integer");
  }
  return out;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
    throw ConfigError("config key '" + key + "': '" + *v + "' is not a non-negative integer");
  }
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("config key '" + key + "': '" + *v + "' is not a boolean");
}

std::string KeyValueConfig::resolve_path(const std::string& value) const {
  const std::filesystem::path p(value);
  if (p.is_absolute()) return value;
  return (std::filesystem::path(base_dir_) / p).lexically_normal().string();
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t KeyValueConfig::hash() const { return fnv1a64(canonical()); }

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

void KeyValueConfig::reject_unknown() const {
  const auto unused = unused_keys();
  if (unused.empty()) return;
  std::string msg = "unknown config keys:";
  for (const auto& k : unused) msg += " " + k;
  throw ConfigError(msg);
}

namespace {

IdmParams idm_from(const KeyValueConfig& kv) {
  IdmParams p;
  p.v0 = kv.get_double("idm.v0", p.v0);
  p.T = kv.get_double("idm.T", p.T);
  p.a = kv.get_double("idm.a", p.a);
  p.b = kv.get_double("idm.b", p.b);
  p.delta = kv.get_double("idm.delta", p.delta);
  p.s0 = kv.get_double("idm.s0", p.s0);
  p.noise_sigma = kv.get_double("idm.noise_sigma", p.noise_sigma);
  p.validate();
  return p;
}

AccPlantParams plant_from(const KeyValueConfig& kv) {
  AccPlantParams p;
  p.k_gap = kv.get_double("acc.k_gap", p.k_gap);
  p.k_speed = kv.get_double("acc.k_speed", p.k_speed);
  p.k_free = kv.get_double("acc.k_free", p.k_free);
  p.actuation_delay = static_cast<int>(kv.get_int("acc.delay", p.actuation_delay));
  p.validate();
  return p;
}

ClosingSpeedCoefficients closing_from(const KeyValueConfig& kv) {
  ClosingSpeedCoefficients c;
  c.gain = kv.get_double("closing.gain", c.gain);
  c.offset = kv.get_double("closing.offset", c.offset);
  return c;
}

std::shared_ptr<const Policy> policy_from(const KeyValueConfig& kv, const std::string& key) {
  if (!kv.has(key)) return nullptr;
  return std::make_shared<const Policy>(load_policy(kv.resolve_path(kv.get_string(key, ""))));
}

}  // namespace

ControllerSpec controller_from_config(const KeyValueConfig& kv, const LeaderTrajectory& leader) {
  const std::string av = kv.get_string("av", "idm");
  if (av == "idm") return IdmSpec{idm_from(kv)};
  if (av == "follower_stopper") {
    FollowerStopperSpec fs;
    const std::string v_des = kv.get_string("fs.v_des", "auto");
    fs.params.v_des = v_des == "auto" ? leader.mean_speed() : kv.get_double("fs.v_des", 0.0);
    for (int k = 0; k < 3; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      fs.params.dx0[idx] = kv.get_double("fs.dx0_" + std::to_string(k + 1), fs.params.dx0[idx]);
      fs.params.d[idx] = kv.get_double("fs.d_" + std::to_string(k + 1), fs.params.d[idx]);
    }
    fs.min_accel = kv.get_double("fs.min_accel", fs.min_accel);
    fs.max_accel = kv.get_double("fs.max_accel", fs.max_accel);
    fs.params.validate();
    return fs;
  }
  if (av == "stock_acc") {
    StockAccSpec s;
    s.plant = plant_from(kv);
    s.settings = AccSettings::from_mph(kv.get_double("acc.speed_mph", kAccMaxSpeedMph),
                                       static_cast<int>(kv.get_int("acc.gap_bars", 2)));
    s.settings.validate();
    return s;
  }
  if (av == "rl_accel") {
    RlAccelSpec s;
    s.policy = policy_from(kv, "policy");
    if (!s.policy) throw ConfigError("av = rl_accel needs 'policy'");
    s.closing = closing_from(kv);
    return s;
  }
  if (av == "rl_acc") {
    RlAccSpec s;
    const auto both = policy_from(kv, "policy");
    s.low_speed = kv.has("policy.low") ? policy_from(kv, "policy.low") : both;
    s.high_speed = kv.has("policy.high") ? policy_from(kv, "policy.high") : both;
    if (!s.low_speed && !s.high_speed) throw ConfigError("av = rl_acc needs a policy");
    s.plant = plant_from(kv);
    s.switch_mph = kv.get_double("switch_mph", s.switch_mph);
    s.closing = closing_from(kv);
    return s;
  }
  throw ConfigError("unknown av controller '" + av + "'");
}

ScenarioConfig scenario_from_config(const KeyValueConfig& kv) {
  ScenarioConfig cfg;
  cfg.n_platoons = static_cast<int>(kv.get_int("n_platoons", cfg.n_platoons));
  cfg.humans_per_platoon = static_cast<int>(kv.get_int("humans_per_platoon", cfg.humans_per_platoon));
  if (kv.has("penetration")) {
    if (kv.has("humans_per_platoon")) {
      throw ConfigError("set either penetration or humans_per_platoon, not both");
    }
    const double p = kv.get_double("penetration", 0.05);
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("penetration must be in (0, 1]");
    cfg.humans_per_platoon = static_cast<int>(std::lround(1.0 / p)) - 1;
  }
  cfg.seed = kv.get_u64("seed", cfg.seed);
  cfg.dt = kv.get_double("dt", cfg.dt);
  cfg.duration = kv.get_double("duration", cfg.duration);
  cfg.lane_change_rate = kv.get_double("lane_change_rate", cfg.lane_change_rate);
  cfg.vehicle_length = kv.get_double("vehicle_length", cfg.vehicle_length);
  cfg.grade = kv.get_double("grade", cfg.grade);
  cfg.idm = idm_from(kv);

  if (kv.has("trajectory.file")) {
    if (kv.has("trajectory.kind")) {
      throw ConfigError("set either trajectory.file or trajectory.kind, not both");
    }
    cfg.leader = load_trajectory_csv(kv.resolve_path(kv.get_string("trajectory.file", "")));
  } else {
    const TrajectoryKind kind = parse_trajectory_kind(kv.get_string("trajectory.kind", "shockwave"));
    const double duration = kv.get_double("trajectory.duration", 600.0);
    const std::uint64_t seed = kv.get_u64("trajectory.seed", cfg.seed);
    cfg.leader = synth_trajectory(kind, duration, seed);
  }

  cfg.feed.segment_length = kv.get_double("feed.segment_length", cfg.feed.segment_length);
  cfg.feed.aggregation_window = kv.get_double("feed.window", cfg.feed.aggregation_window);
  cfg.feed.latency = kv.get_double("feed.latency", cfg.feed.latency);
  cfg.feed.max_headway_flag = kv.get_bool("feed.max_headway_flag", cfg.feed.max_headway_flag);

  if (kv.has("energy.model")) {
    const std::string path = kv.resolve_path(kv.get_string("energy.model", ""));
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open energy model '" + path + "'");
    cfg.energy = read_energy_model(in);
  }
  cfg.av_controller = controller_from_config(kv, cfg.leader);
  cfg.validate();
  return cfg;
}

TrainConfig train_from_config(const KeyValueConfig& kv) {
  TrainConfig cfg;
  cfg.env.variant = parse_policy_variant(kv.get_string("train.variant", "accel"));
  cfg.iterations = static_cast<int>(kv.get_int("train.iterations", cfg.iterations));
  cfg.episodes_per_iter = static_cast<int>(kv.get_int("train.episodes", cfg.episodes_per_iter));
  cfg.env.horizon = static_cast<int>(kv.get_int("train.horizon", cfg.env.horizon));
  cfg.env.warmup = kv.get_double("train.warmup", cfg.env.warmup);
  cfg.env.humans = static_cast<int>(kv.get_int("train.humans", cfg.env.humans));
  cfg.env.kind = parse_trajectory_kind(kv.get_string("train.kind", "shockwave"));
  cfg.env.trajectory_seed_base = kv.get_u64("train.trajectory_seed_base", cfg.env.trajectory_seed_base);
  cfg.env.trajectory_pool = static_cast<int>(kv.get_int("train.pool", cfg.env.trajectory_pool));
  cfg.env.constant_reward = kv.get_bool("train.constant_reward", cfg.env.constant_reward);
  cfg.env.collision_penalty = kv.get_double("train.collision_penalty", cfg.env.collision_penalty);
  cfg.env.idm = idm_from(kv);
  cfg.env.plant = plant_from(kv);
  cfg.env.closing = closing_from(kv);
  cfg.gamma = kv.get_double("train.gamma", cfg.gamma);
  cfg.lambda = kv.get_double("train.lambda", cfg.lambda);
  cfg.reward_scale = kv.get_double("train.reward_scale", cfg.reward_scale);
  cfg.seed = kv.get_u64("train.seed", cfg.seed);
  cfg.switch_mph = kv.get_double("switch_mph", cfg.switch_mph);

  cfg.ppo.clip_eps = kv.get_double("ppo.clip", cfg.ppo.clip_eps);
  cfg.ppo.actor_lr = kv.get_double("ppo.actor_lr", cfg.ppo.actor_lr);
  cfg.ppo.critic_lr = kv.get_double("ppo.critic_lr", cfg.ppo.critic_lr);
  cfg.ppo.epochs = static_cast<int>(kv.get_int("ppo.epochs", cfg.ppo.epochs));
  cfg.ppo.minibatch = static_cast<int>(kv.get_int("ppo.minibatch", cfg.ppo.minibatch));
  cfg.ppo.entropy_coef = kv.get_double("ppo.entropy", cfg.ppo.entropy_coef);
  cfg.ppo.max_grad_norm = kv.get_double("ppo.max_grad_norm", cfg.ppo.max_grad_norm);

  cfg.shape.hidden = static_cast<int>(kv.get_int("policy.hidden", cfg.shape.hidden));
  cfg.shape.hidden_layers = static_cast<int>(kv.get_int("policy.layers", cfg.shape.hidden_layers));
  cfg.init_log_std = kv.get_double("policy.init_log_std", cfg.init_log_std);

  if (is_acc_variant(cfg.env.variant)) {
    auto& c = cfg.env.acc_reward;
    c.c1 = kv.get_double("reward.c1", c.c1);
    c.c2 = kv.get_double("reward.c2", c.c2);
    c.c3 = kv.get_double("reward.c3", c.c3);
    c.c4 = kv.get_double("reward.c4", c.c4);
  } else {
    auto& c = cfg.env.accel_reward;
    c.c1 = kv.get_double("reward.c1", c.c1);
    c.c2 = kv.get_double("reward.c2", c.c2);
    c.c3 = kv.get_double("reward.c3", c.c3);
    c.c4 = kv.get_double("reward.c4", c.c4);
  }
  cfg.validate();
  return cfg;
}

}  // namespace wavesim
