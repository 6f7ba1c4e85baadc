#include "wavesim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wavesim/errors.hpp"

namespace wavesim {

void PpoConfig::validate() const {
  if (!(clip_eps > 0)) throw ConfigError("ppo clip_eps must be positive");
  if (!(actor_lr > 0) || !(critic_lr > 0)) throw ConfigError("ppo learning rates must be positive");
  if (epochs < 1 || minibatch < 1) throw ConfigError("ppo epochs and minibatch must be >= 1");
  if (!(entropy_coef >= 0)) throw ConfigError("ppo entropy_coef must be >= 0");
  if (!(max_grad_norm > 0)) throw ConfigError("ppo max_grad_norm must be positive");
  if (!(min_log_std < max_log_std)) throw ConfigError("ppo log-std bounds are inverted");
}

void RolloutBatch::validate(const Policy& policy) const {
  const Eigen::Index n = size();
  if (obs.rows() != policy.obs_size()) throw ShapeError("rollout obs width does not match policy");
  if (aux.size() != n || log_prob.size() != n || advantage.size() != n || ret.size() != n ||
      static_cast<Eigen::Index>(actions.size()) != n) {
    throw ShapeError("rollout columns have inconsistent lengths");
  }
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_gae(std::span<const double> rewards,
                                                        std::span<const double> values,
                                                        double last_value, bool terminal,
                                                        double gamma, double lambda) {
  if (rewards.size() != values.size()) throw ShapeError("rewards and values differ in length");
  const auto n = static_cast<Eigen::Index>(rewards.size());
  Eigen::VectorXd adv(n), ret(n);
  double next_value = terminal ? 0.0 : last_value;
  double acc = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    const double delta = rewards[k] + gamma * next_value - values[k];
    acc = delta + gamma * lambda * acc;
    adv(i) = acc;
    ret(i) = acc + values[k];
    next_value = values[k];
  }
  return {adv, ret};
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double g = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) g = *it + gamma * g;
  return g;
}

double clipped_surrogate_coeff(double ratio, double advantage, double eps) {
  if (advantage > 0 && ratio > 1.0 + eps) return 0.0;
  if (advantage < 0 && ratio < 1.0 - eps) return 0.0;
  return ratio * advantage;
}

PpoOptimizer::PpoOptimizer(const Policy& policy, const PpoConfig& cfg)
    : actor(policy.actor().params().size() + 1, cfg.actor_lr),
      critic(policy.critic().params().size(), cfg.critic_lr) {}

namespace {

double clip_norm(Eigen::VectorXd& g, double max_norm) {
  const double norm = g.norm();
  if (norm > max_norm) g *= max_norm / norm;
  return norm;
}

struct Snapshot {
  Eigen::VectorXd actor, critic;
  double log_std;
};

}  // namespace

PpoStats ppo_update(const RolloutBatch& batch, Policy& policy, const PpoConfig& cfg,
                    PpoOptimizer& opt, std::mt19937_64& rng) {
  cfg.validate();
  batch.validate(policy);
  const Eigen::Index n = batch.size();
  if (n == 0) return {};
  const Snapshot saved{policy.actor().params(), policy.critic().params(), policy.log_std()};
  auto fail = [&](const char* what) {
    policy.actor().params() = saved.actor;
    policy.critic().params() = saved.critic;
    policy.log_std() = saved.log_std;
    throw NumericalError(what);
  };

  Eigen::VectorXd adv = batch.advantage;
  const double mean = adv.mean();
  const double sd = std::sqrt((adv.array() - mean).square().mean());
  // A constant batch (e.g. one sample) keeps its sign instead of collapsing to 0.
  if (sd > 1e-8) adv = (adv.array() - mean) / sd;
  if (!adv.allFinite() || !batch.ret.allFinite()) fail("non-finite advantages or returns");

  const bool acc = is_acc_variant(policy.variant());
  const int obs_n = policy.obs_size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  PpoStats stats;
  long minibatches = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += cfg.minibatch) {
      const Eigen::Index m = std::min<Eigen::Index>(cfg.minibatch, n - start);
      Eigen::MatrixXd x(obs_n, m), xc(obs_n + 1, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index i = order[static_cast<std::size_t>(start + j)];
        x.col(j) = batch.obs.col(i);
        xc.col(j) << batch.obs.col(i), batch.aux(i);
      }

      // actor
      Mlp::Cache cache;
      const Eigen::MatrixXd head = policy.actor().forward(x, &cache);
      const double log_std = policy.log_std();
      const double inv_var = std::exp(-2.0 * log_std);
      Eigen::MatrixXd d_head = Eigen::MatrixXd::Zero(head.rows(), m);
      double d_log_std = 0.0;
      double loss = 0.0, entropy = 0.0, kl = 0.0;
      long clipped = 0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index i = order[static_cast<std::size_t>(start + j)];
        const PolicyAction& act = batch.actions[static_cast<std::size_t>(i)];
        const double diff = act.u - head(0, j);
        double lp = -0.5 * diff * diff * inv_var - log_std - 0.91893853320467274178;
        double ent = log_std + 1.41893853320467274178;
        Eigen::Vector3d probs = Eigen::Vector3d::Zero();
        Eigen::Vector3d logp_bars = Eigen::Vector3d::Zero();
        if (acc) {
          const Eigen::Vector3d logits = head.block<kGapBars, 1>(1, j);
          const double mx = logits.maxCoeff();
          const double lse = mx + std::log((logits.array() - mx).exp().sum());
          logp_bars = logits.array() - lse;
          probs = logp_bars.array().exp();
          lp += logp_bars(act.bar - 1);
          ent -= probs.dot(logp_bars);
        }
        const double log_ratio = lp - batch.log_prob(i);
        const double ratio = std::exp(log_ratio);
        const double a = adv(i);
        loss -= std::min(ratio * a, std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * a);
        entropy += ent;
        kl += (ratio - 1.0) - log_ratio;
        if (std::abs(ratio - 1.0) > cfg.clip_eps) ++clipped;

        // gradient of the loss (to be minimized)
        const double c = -clipped_surrogate_coeff(ratio, a, cfg.clip_eps) / static_cast<double>(m);
        d_head(0, j) = c * diff * inv_var;
        d_log_std += c * (diff * diff * inv_var - 1.0) - cfg.entropy_coef / static_cast<double>(m);
        if (acc) {
          for (int k = 0; k < kGapBars; ++k) {
            const double onehot = act.bar - 1 == k ? 1.0 : 0.0;
            const double d_ent = -probs(k) * (logp_bars(k) + (ent - log_std - 1.41893853320467274178));
            d_head(1 + k, j) = c * (onehot - probs(k)) - cfg.entropy_coef * d_ent / static_cast<double>(m);
          }
        }
      }
      loss = loss / static_cast<double>(m) - cfg.entropy_coef * entropy / static_cast<double>(m);
      Eigen::VectorXd g_actor = Eigen::VectorXd::Zero(policy.actor().params().size() + 1);
      Eigen::VectorXd g_body = Eigen::VectorXd::Zero(policy.actor().params().size());
      policy.actor().backward(cache, d_head, g_body);
      g_actor << g_body, d_log_std;

      // critic
      Mlp::Cache ccache;
      const Eigen::MatrixXd v = policy.critic().forward(xc, &ccache);
      Eigen::MatrixXd d_v(1, m);
      double vloss = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index i = order[static_cast<std::size_t>(start + j)];
        const double err = v(0, j) - batch.ret(i);
        vloss += 0.5 * err * err;
        d_v(0, j) = err / static_cast<double>(m);
      }
      vloss /= static_cast<double>(m);
      Eigen::VectorXd g_critic = Eigen::VectorXd::Zero(policy.critic().params().size());
      policy.critic().backward(ccache, d_v, g_critic);

      if (!std::isfinite(loss) || !std::isfinite(vloss) || !g_actor.allFinite() ||
          !g_critic.allFinite()) {
        fail("non-finite loss in PPO update");
      }
      clip_norm(g_actor, cfg.max_grad_norm);
      clip_norm(g_critic, cfg.max_grad_norm);

      Eigen::VectorXd theta(g_actor.size());
      theta << policy.actor().params(), policy.log_std();
      opt.actor.step(theta, g_actor);
      policy.actor().params() = theta.head(theta.size() - 1);
      policy.log_std() = std::clamp(theta(theta.size() - 1), cfg.min_log_std, cfg.max_log_std);
      opt.critic.step(policy.critic().params(), g_critic);

      stats.policy_loss += loss;
      stats.value_loss += vloss;
      stats.entropy += entropy / static_cast<double>(m);
      stats.approx_kl += kl / static_cast<double>(m);
      stats.clip_fraction += static_cast<double>(clipped) / static_cast<double>(m);
      ++minibatches;
    }
  }
  if (!policy.finite()) fail("PPO update produced non-finite weights");
  const double k = static_cast<double>(minibatches);
  stats.policy_loss /= k;
  stats.value_loss /= k;
  stats.entropy /= k;
  stats.approx_kl /= k;
  stats.clip_fraction /= k;
  return stats;
}

PpoStats ppo_update(const RolloutBatch& batch, Policy& policy, const PpoConfig& cfg,
                    std::mt19937_64& rng) {
  PpoOptimizer opt(policy, cfg);
  return ppo_update(batch, policy, cfg, opt, rng);
}

}  // namespace wavesim
