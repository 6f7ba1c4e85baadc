#include "wavesim/policy.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wavesim/acc_plant.hpp"
#include "wavesim/errors.hpp"
#include "wavesim/trace.hpp"
#include "wavesim/wrappers.hpp"

namespace wavesim {

const char* to_string(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::kAccel:
      return "accel";
    case PolicyVariant::kAccLow:
      return "acc_low";
    case PolicyVariant::kAccHigh:
      return "acc_high";
  }
  return "unknown";
}

PolicyVariant parse_policy_variant(std::string_view name) {
  if (name == "accel") return PolicyVariant::kAccel;
  if (name == "acc_low") return PolicyVariant::kAccLow;
  if (name == "acc_high") return PolicyVariant::kAccHigh;
  throw ConfigError("unknown policy variant '" + std::string(name) + "'");
}

int observation_size(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::kAccel:
      return 14;
    case PolicyVariant::kAccLow:
      return 34;
    case PolicyVariant::kAccHigh:
      return 12;
  }
  return 0;
}

bool is_acc_variant(PolicyVariant v) { return v != PolicyVariant::kAccel; }

ActionBounds continuous_bounds(PolicyVariant v) {
  if (is_acc_variant(v)) return {kAccMinSpeedMph, kAccMaxSpeedMph};
  return {kActionMinAccel, kActionMaxAccel};
}

double squash(double u, const ActionBounds& b) {
  return b.lo + (b.hi - b.lo) * 0.5 * (std::tanh(u) + 1.0);
}

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

std::vector<int> layer_sizes(int in, int out, const PolicyShape& shape) {
  std::vector<int> sizes{in};
  for (int i = 0; i < shape.hidden_layers; ++i) sizes.push_back(shape.hidden);
  sizes.push_back(out);
  return sizes;
}

int head_width(PolicyVariant v) { return is_acc_variant(v) ? 1 + kGapBars : 1; }

}  // namespace

Policy::Policy(PolicyVariant variant, PolicyShape shape)
    : variant_(variant),
      actor_(layer_sizes(observation_size(variant), head_width(variant), shape)),
      critic_(layer_sizes(observation_size(variant) + 1, 1, shape)) {}

Policy Policy::create(PolicyVariant variant, std::uint64_t seed, PolicyShape shape,
                      double init_log_std) {
  Policy p(variant, shape);
  std::mt19937_64 rng(seed);
  p.actor_.init(rng, 0.01);
  p.critic_.init(rng, 1.0);
  p.log_std_ = init_log_std;
  return p;
}

Policy Policy::zeros(PolicyVariant variant, PolicyShape shape) {
  Policy p(variant, shape);
  p.log_std_ = 0.0;
  return p;
}

void Policy::check_obs(const Eigen::VectorXd& obs) const {
  if (obs.size() != obs_size()) {
    throw ShapeError("observation length " + std::to_string(obs.size()) +
                     " does not match policy input " + std::to_string(obs_size()));
  }
}

PolicyOutput Policy::forward(const Eigen::VectorXd& obs) const {
  check_obs(obs);
  const Eigen::VectorXd head = actor_.forward_one(obs);
  PolicyOutput out;
  out.mean_u = head(0);
  out.log_std = log_std_;
  out.mean_action = squash(out.mean_u, continuous_bounds(variant_));
  if (is_acc_variant(variant_)) {
    out.logits = head.segment<kGapBars>(1);
    const Eigen::Vector3d shifted = out.logits.array() - out.logits.maxCoeff();
    const Eigen::Vector3d e = shifted.array().exp();
    out.probs = e / e.sum();
    int best = 1;  // middle bar wins ties
    if (out.logits(0) > out.logits(best)) best = 0;
    if (out.logits(2) > out.logits(best)) best = 2;
    out.mode_bar = best + 1;
  }
  return out;
}

PolicyAction Policy::sample(const PolicyOutput& out, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  PolicyAction a;
  a.u = out.mean_u + std::exp(out.log_std) * normal(rng);
  if (is_acc_variant(variant_)) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double r = u01(rng);
    a.bar = r < out.probs(0) ? 1 : (r < out.probs(0) + out.probs(1) ? 2 : 3);
  }
  return a;
}

PolicyAction Policy::mode(const PolicyOutput& out) const {
  return {out.mean_u, is_acc_variant(variant_) ? out.mode_bar : 2};
}

double Policy::log_prob(const PolicyOutput& out, const PolicyAction& action) const {
  const double z = (action.u - out.mean_u) * std::exp(-out.log_std);
  double lp = -0.5 * z * z - out.log_std - kLogSqrt2Pi;
  if (is_acc_variant(variant_)) {
    const double m = out.logits.maxCoeff();
    const double lse = m + std::log((out.logits.array() - m).exp().sum());
    lp += out.logits(action.bar - 1) - lse;
  }
  return lp;
}

double Policy::log_prob(const Eigen::VectorXd& obs, const PolicyAction& action) const {
  return log_prob(forward(obs), action);
}

double Policy::value(const Eigen::VectorXd& obs, double aux) const {
  check_obs(obs);
  Eigen::VectorXd x(obs.size() + 1);
  x << obs, aux;
  return critic_.forward_one(x)(0);
}

Eigen::VectorXd Policy::log_prob_gradient(const Eigen::VectorXd& obs,
                                          const PolicyAction& action) const {
  check_obs(obs);
  Mlp::Cache cache;
  const Eigen::MatrixXd head = actor_.forward(obs, &cache);
  const double mean_u = head(0, 0);
  const double inv_var = std::exp(-2.0 * log_std_);
  const double diff = action.u - mean_u;

  Eigen::MatrixXd d_head = Eigen::MatrixXd::Zero(head.rows(), 1);
  d_head(0, 0) = diff * inv_var;
  if (is_acc_variant(variant_)) {
    const Eigen::Vector3d logits = head.block<kGapBars, 1>(1, 0);
    const Eigen::Vector3d e = (logits.array() - logits.maxCoeff()).exp();
    const Eigen::Vector3d probs = e / e.sum();
    for (int k = 0; k < kGapBars; ++k) {
      d_head(1 + k, 0) = (action.bar - 1 == k ? 1.0 : 0.0) - probs(k);
    }
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(actor_.params().size());
  actor_.backward(cache, d_head, grad);
  Eigen::VectorXd full(grad.size() + 1);
  full << grad, diff * diff * inv_var - 1.0;
  return full;
}

bool Policy::finite() const {
  return actor_.params().allFinite() && critic_.params().allFinite() && std::isfinite(log_std_);
}

namespace {

void write_mlp(std::ostream& os, const char* name, const Mlp& mlp) {
  os << name << ' ' << mlp.sizes().size();
  for (int s : mlp.sizes()) os << ' ' << s;
  os << '\n' << name << "_params " << mlp.params().size() << '\n';
  for (Eigen::Index i = 0; i < mlp.params().size(); ++i) {
    os << format_double(mlp.params()(i)) << '\n';
  }
}

std::vector<int> read_sizes(std::istream& is, const std::string& name) {
  std::string tag;
  std::size_t n = 0;
  if (!(is >> tag >> n) || tag != name) throw ConfigError("policy file: expected '" + name + "'");
  std::vector<int> sizes(n);
  for (auto& s : sizes) {
    if (!(is >> s)) throw ConfigError("policy file: truncated layer sizes");
  }
  return sizes;
}

void read_params(std::istream& is, const std::string& name, Mlp& mlp) {
  std::string tag;
  Eigen::Index n = 0;
  if (!(is >> tag >> n) || tag != name + "_params" || n != mlp.params().size()) {
    throw ConfigError("policy file: parameter block '" + name + "' does not match its layout");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    std::string token;
    if (!(is >> token)) throw ConfigError("policy file: truncated parameters");
    mlp.params()(i) = std::strtod(token.c_str(), nullptr);
  }
}

}  // namespace

void write_policy(std::ostream& os, const Policy& policy) {
  os << "wavesim-policy 1\n";
  os << "variant " << to_string(policy.variant()) << '\n';
  os << "log_std " << format_double(policy.log_std()) << '\n';
  write_mlp(os, "actor", policy.actor());
  write_mlp(os, "critic", policy.critic());
}

Policy read_policy(std::istream& is) {
  std::string magic, tag, variant_name, log_std_token;
  int version = 0;
  if (!(is >> magic >> version) || magic != "wavesim-policy") {
    throw ConfigError("not a wavesim policy file");
  }
  if (version != 1) throw ConfigError("unsupported policy file version");
  if (!(is >> tag >> variant_name) || tag != "variant") {
    throw ConfigError("policy file: missing variant");
  }
  if (!(is >> tag >> log_std_token) || tag != "log_std") {
    throw ConfigError("policy file: missing log_std");
  }
  const PolicyVariant variant = parse_policy_variant(variant_name);
  const auto actor_sizes = read_sizes(is, "actor");
  if (actor_sizes.size() < 3) throw ConfigError("policy file: actor needs a hidden layer");
  PolicyShape shape{actor_sizes[1], static_cast<int>(actor_sizes.size()) - 2};
  Policy policy(variant, shape);
  if (actor_sizes != policy.actor().sizes()) {
    throw ConfigError("policy file: actor layout does not match variant");
  }
  read_params(is, "actor", policy.actor());
  const auto critic_sizes = read_sizes(is, "critic");
  if (critic_sizes != policy.critic().sizes()) {
    throw ConfigError("policy file: critic layout does not match variant");
  }
  read_params(is, "critic", policy.critic());
  policy.log_std() = std::strtod(log_std_token.c_str(), nullptr);
  if (!policy.finite()) throw ConfigError("policy file contains non-finite weights");
  return policy;
}

void save_policy(const std::string& path, const Policy& policy) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write policy file '" + path + "'");
  write_policy(out, policy);
}

Policy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open policy file '" + path + "'");
  return read_policy(in);
}

}  // namespace wavesim
