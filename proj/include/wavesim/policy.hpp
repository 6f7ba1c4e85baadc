#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>

#include "wavesim/mlp.hpp"

namespace wavesim {

enum class PolicyVariant {
  kAccel,    // raw acceleration in [-3, 1.5] m/s^2
  kAccLow,   // ACC settings, low-speed observation layout
  kAccHigh,  // ACC settings, high-speed observation layout
};

const char* to_string(PolicyVariant v);
PolicyVariant parse_policy_variant(std::string_view name);

int observation_size(PolicyVariant v);
bool is_acc_variant(PolicyVariant v);

struct ActionBounds {
  double lo;
  double hi;
  double midpoint() const { return 0.5 * (lo + hi); }
};

// [-3, 1.5] m/s^2 for acceleration policies, [20, 73] mph for ACC speed.
ActionBounds continuous_bounds(PolicyVariant v);

// lo + (hi - lo) (tanh(u) + 1) / 2.
double squash(double u, const ActionBounds& b);

inline constexpr int kGapBars = 3;

// A sampled action in the policy's native space: u is the pre-squash Gaussian
// sample, bar the ACC gap setting (1..3, unused for kAccel).
struct PolicyAction {
  double u = 0.0;
  int bar = 2;
};

struct PolicyOutput {
  double mean_u = 0.0;
  double log_std = 0.0;
  double mean_action = 0.0;     // squash(mean_u)
  Eigen::Vector3d logits = Eigen::Vector3d::Zero();
  Eigen::Vector3d probs = Eigen::Vector3d::Constant(1.0 / 3.0);
  int mode_bar = 2;             // argmax, ties toward the middle bar
};

struct PolicyShape {
  int hidden = 64;
  int hidden_layers = 2;
};

// Gaussian (plus categorical gap-bar head for ACC variants) policy with a
// separate critic. The critic sees the observation plus one privileged input:
// the platoon-mean fuel rate.
class Policy {
 public:
  Policy() = default;
  Policy(PolicyVariant variant, PolicyShape shape = {});

  // Random init; actor output layer scaled by 0.01.
  static Policy create(PolicyVariant variant, std::uint64_t seed, PolicyShape shape = {},
                       double init_log_std = -0.5);
  // All actor/critic weights zero.
  static Policy zeros(PolicyVariant variant, PolicyShape shape = {});

  PolicyVariant variant() const { return variant_; }
  int obs_size() const { return actor_.input_size(); }
  int head_size() const { return actor_.output_size(); }

  PolicyOutput forward(const Eigen::VectorXd& obs) const;
  PolicyAction sample(const PolicyOutput& out, std::mt19937_64& rng) const;
  PolicyAction mode(const PolicyOutput& out) const;
  double log_prob(const PolicyOutput& out, const PolicyAction& action) const;
  double log_prob(const Eigen::VectorXd& obs, const PolicyAction& action) const;
  double value(const Eigen::VectorXd& obs, double aux) const;

  // Gradient of log_prob w.r.t. [actor params..., log_std].
  Eigen::VectorXd log_prob_gradient(const Eigen::VectorXd& obs,
                                    const PolicyAction& action) const;

  Mlp& actor() { return actor_; }
  const Mlp& actor() const { return actor_; }
  Mlp& critic() { return critic_; }
  const Mlp& critic() const { return critic_; }
  double& log_std() { return log_std_; }
  double log_std() const { return log_std_; }

  bool finite() const;

 private:
  void check_obs(const Eigen::VectorXd& obs) const;

  PolicyVariant variant_ = PolicyVariant::kAccel;
  Mlp actor_;
  Mlp critic_;
  double log_std_ = -0.5;
};

// Versioned text format; doubles use shortest round-trip form.
void write_policy(std::ostream& os, const Policy& policy);
Policy read_policy(std::istream& is);
void save_policy(const std::string& path, const Policy& policy);
Policy load_policy(const std::string& path);

}  // namespace wavesim
