#include "wavesim/train.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "wavesim/errors.hpp"
#include "wavesim/trace.hpp"

namespace wavesim {

void TrainConfig::validate() const {
  env.validate();
  ppo.validate();
  if (iterations < 1) throw ConfigError("train iterations must be >= 1");
  if (episodes_per_iter < 1) throw ConfigError("train episodes_per_iter must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("train gamma must be in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("train lambda must be in [0, 1]");
  if (!(reward_scale > 0)) throw ConfigError("train reward_scale must be positive");
  if (shape.hidden < 1 || shape.hidden_layers < 1) throw ConfigError("policy shape too small");
}

namespace {

Eigen::VectorXd critic_values(const Policy& policy, const Episode& ep) {
  const auto n = static_cast<Eigen::Index>(ep.obs.size());
  Eigen::MatrixXd x(policy.obs_size() + 1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.col(i) << ep.obs[static_cast<std::size_t>(i)], ep.aux[static_cast<std::size_t>(i)];
  }
  return policy.critic().forward(x).row(0).transpose();
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrainProgress& progress) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Policy policy = Policy::create(cfg.env.variant, rng(), cfg.shape, cfg.init_log_std);
  PlatoonEnv env(cfg.env);
  PpoOptimizer opt(policy, cfg.ppo);

  TrainResult result;
  double best_return = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    std::vector<Episode> episodes;
    for (int e = 0; e < cfg.episodes_per_iter; ++e) {
      episodes.push_back(env.run_episode(policy, rng, true));
    }

    RolloutBatch batch;
    Eigen::Index total = 0;
    for (const auto& ep : episodes) total += static_cast<Eigen::Index>(ep.obs.size());
    batch.obs.resize(policy.obs_size(), total);
    batch.aux.resize(total);
    batch.log_prob.resize(total);
    batch.advantage.resize(total);
    batch.ret.resize(total);
    batch.actions.reserve(static_cast<std::size_t>(total));

    CurvePoint point;
    point.iter = iter;
    double sum = 0.0, sum_sq = 0.0, dist = 0.0, fuel = 0.0;
    Eigen::Index col = 0;
    for (const auto& ep : episodes) {
      const double g = ep.total_reward();
      sum += g;
      sum_sq += g * g;
      dist += ep.distance;
      fuel += ep.fuel;
      if (ep.obs.empty()) continue;

      const Eigen::VectorXd values = critic_values(policy, ep);
      const double last_value =
          ep.terminal ? 0.0 : policy.value(ep.final_obs, ep.final_aux);
      std::vector<double> scaled(ep.rewards.size());
      for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = cfg.reward_scale * ep.rewards[i];
      const auto [adv, ret] = compute_gae(
          scaled, std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
          last_value, ep.terminal, cfg.gamma, cfg.lambda);
      const auto n = static_cast<Eigen::Index>(ep.obs.size());
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        batch.obs.col(col + i) = ep.obs[k];
        batch.aux(col + i) = ep.aux[k];
        batch.log_prob(col + i) = ep.log_probs[k];
        batch.actions.push_back(ep.actions[k]);
      }
      batch.advantage.segment(col, n) = adv;
      batch.ret.segment(col, n) = ret;
      col += n;
    }
    const double count = static_cast<double>(episodes.size());
    point.mean_return = sum / count;
    point.std_return = std::sqrt(std::max(0.0, sum_sq / count - point.mean_return * point.mean_return));
    point.system_mpg = mpg_from_grams(dist, fuel);
    result.curve.push_back(point);

    if (point.mean_return > best_return) {
      best_return = point.mean_return;
      result.best = policy;
      result.best_iter = iter;
    }
    const PpoStats stats = ppo_update(batch, policy, cfg.ppo, opt, rng);
    if (progress) progress(point, stats);
  }
  result.last = policy;
  return result;
}

void write_learning_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << kCurveCsvHeader << '\n';
  for (const auto& p : curve) {
    os << p.iter << ',' << format_double(p.mean_return) << ',' << format_double(p.std_return)
       << ',' << format_double(p.system_mpg) << '\n';
  }
}

}  // namespace wavesim
