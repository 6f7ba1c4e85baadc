#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>
#include <vector>

#include "wavesim/mlp.hpp"
#include "wavesim/policy.hpp"

namespace wavesim {

struct PpoConfig {
  double clip_eps = 0.2;
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  int epochs = 5;
  int minibatch = 500;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  double min_log_std = -3.0;
  double max_log_std = 1.0;
  void validate() const;
};

// Flat on-policy batch. Column i of obs belongs to sample i.
struct RolloutBatch {
  Eigen::MatrixXd obs;      // obs_size x N
  Eigen::VectorXd aux;      // privileged critic input
  std::vector<PolicyAction> actions;
  Eigen::VectorXd log_prob;   // behaviour log-probabilities
  Eigen::VectorXd advantage;
  Eigen::VectorXd ret;        // value targets
  Eigen::Index size() const { return obs.cols(); }
  void validate(const Policy& policy) const;
};

// Generalized advantage estimation over one trajectory segment. `terminal`
// marks the segment as ending in a true terminal state; otherwise it is
// bootstrapped from `last_value`. Returns (advantages, value targets).
std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_gae(std::span<const double> rewards,
                                                        std::span<const double> values,
                                                        double last_value, bool terminal,
                                                        double gamma, double lambda);

// sum_i gamma^i r_i
double discounted_return(std::span<const double> rewards, double gamma);

// d/d(log pi) of the clipped surrogate min(r A, clip(r, 1-eps, 1+eps) A) for
// one sample: r A where the unclipped branch is active, 0 where clipping
// binds.
double clipped_surrogate_coeff(double ratio, double advantage, double eps);

struct PpoOptimizer {
  Adam actor;
  Adam critic;
  PpoOptimizer() = default;
  PpoOptimizer(const Policy& policy, const PpoConfig& cfg);
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// Clipped-surrogate ascent on the actor and regression of the critic onto
// `ret`. Advantages are normalized inside. On a non-finite loss or gradient
// the policy is restored and NumericalError is thrown.
PpoStats ppo_update(const RolloutBatch& batch, Policy& policy, const PpoConfig& cfg,
                    PpoOptimizer& opt, std::mt19937_64& rng);

// Same with a fresh optimizer state.
PpoStats ppo_update(const RolloutBatch& batch, Policy& policy, const PpoConfig& cfg,
                    std::mt19937_64& rng);

}  // namespace wavesim
