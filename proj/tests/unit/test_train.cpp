#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wavesim/env.hpp"
#include "wavesim/errors.hpp"
#include "wavesim/idm.hpp"
#include "wavesim/rl_controllers.hpp"
#include "wavesim/train.hpp"
#include "wavesim/units.hpp"
#include "wavesim/wrappers.hpp"

using namespace wavesim;

namespace {

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.iterations = 3;
  cfg.episodes_per_iter = 1;
  cfg.env.warmup = 30.0;
  cfg.env.horizon = 200;
  cfg.env.humans = 5;
  cfg.shape = {16, 2};
  return cfg;
}

}  // namespace

TEST(Train, ConstantRewardReturnAccounting) {
  TrainConfig cfg = small_config(0);
  cfg.iterations = 1;
  cfg.gamma = 1.0;
  cfg.env.horizon = 10;
  cfg.env.constant_reward = true;
  const TrainResult res = train(cfg);
  ASSERT_EQ(res.curve.size(), 1u);
  EXPECT_DOUBLE_EQ(res.curve[0].mean_return, 10.0);
  EXPECT_DOUBLE_EQ(res.curve[0].std_return, 0.0);
}

TEST(Train, DeterministicPerSeed) {
  const TrainResult a = train(small_config(4));
  const TrainResult b = train(small_config(4));
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].mean_return, b.curve[i].mean_return);
    EXPECT_EQ(a.curve[i].system_mpg, b.curve[i].system_mpg);
  }
  EXPECT_EQ(a.last.actor().params(), b.last.actor().params());
  std::ostringstream ca, cb;
  write_learning_curve_csv(ca, a.curve);
  write_learning_curve_csv(cb, b.curve);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().substr(0, ca.str().find('\n')), kCurveCsvHeader);

  const TrainResult c = train(small_config(5));
  EXPECT_NE(c.curve[0].mean_return, a.curve[0].mean_return);
}

TEST(Train, AccVariantRuns) {
  TrainConfig cfg = small_config(1);
  cfg.env.variant = PolicyVariant::kAccLow;
  cfg.iterations = 2;
  const TrainResult res = train(cfg);
  EXPECT_EQ(res.best.variant(), PolicyVariant::kAccLow);
  EXPECT_TRUE(res.best.finite());
  for (const auto& p : res.curve) EXPECT_TRUE(std::isfinite(p.mean_return));
}

TEST(Train, ShortSmokeImprovesOnAverage) {
  double gain = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.iterations = 10;
    const TrainResult res = train(cfg);
    gain += res.curve.back().mean_return - res.curve.front().mean_return;
  }
  EXPECT_GT(gain / 3.0, 0.0);
}

TEST(Train, ConfigValidation) {
  TrainConfig cfg;
  cfg.gamma = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.gamma = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.env.horizon = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Env, EpisodeShapes) {
  EnvConfig cfg;
  cfg.humans = 5;
  cfg.warmup = 20.0;
  cfg.horizon = 150;
  PlatoonEnv env(cfg);
  const Policy p = Policy::create(PolicyVariant::kAccel, 2);
  std::mt19937_64 rng(3);
  const Episode ep = env.run_episode(p, rng);
  if (!ep.terminal) EXPECT_EQ(ep.rewards.size(), 150u);
  EXPECT_EQ(ep.obs.size(), ep.rewards.size());
  EXPECT_EQ(ep.actions.size(), ep.rewards.size());
  EXPECT_EQ(ep.final_obs.size(), 14);
  for (const auto& o : ep.obs) {
    EXPECT_LE(o.maxCoeff(), 1.0);
    EXPECT_GE(o.minCoeff(), -1.0);
  }
  for (double a : ep.aux) EXPECT_GT(a, 0.0);
  EXPECT_GT(ep.system_mpg(), 0.0);
  EXPECT_LT(ep.trajectory_seed, cfg.trajectory_seed_base + cfg.trajectory_pool);
}

TEST(RlControllers, CompositeSwitchesAtSixtyMph) {
  auto low = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccLow));
  auto high = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccHigh));
  RlAccController c(low, high, AccPlantParams{}, 60.0);
  EXPECT_EQ(c.policy_for(units::mph_to_mps(59.9)).variant(), PolicyVariant::kAccLow);
  EXPECT_EQ(c.policy_for(units::mph_to_mps(60.0)).variant(), PolicyVariant::kAccHigh);
  EXPECT_EQ(c.policy_for(units::mph_to_mps(72.0)).variant(), PolicyVariant::kAccHigh);
  RlAccController only_low(low, nullptr, AccPlantParams{});
  EXPECT_EQ(only_low.policy_for(30.0).variant(), PolicyVariant::kAccLow);
}

TEST(RlControllers, CompositeEmitsSelectedPolicysAction) {
  auto low = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccLow));
  auto high = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccHigh));
  AccPlantParams plant;
  plant.actuation_delay = 0;
  RlAccController c(low, high, plant, 60.0);
  PolicyVariant seen = PolicyVariant::kAccel;
  c.set_action_source([&](const Policy& p, const Eigen::VectorXd&) {
    seen = p.variant();
    return PolicyAction{10.0, 1};
  });
  std::mt19937_64 rng(0);
  ControlContext ctx;
  ctx.has_leader = false;
  ctx.v = units::mph_to_mps(65.0);
  c.control(ctx, rng);
  EXPECT_EQ(seen, PolicyVariant::kAccHigh);
  // u = 10 squashes to 73 mph; the clip caps it at mean + 5.
  EXPECT_NEAR(c.latest_request().speed_setting_mph(), 70.0, 1e-9);
  EXPECT_EQ(c.latest_request().gap_setting, 1);
  ctx.v = units::mph_to_mps(40.0);
  c.control(ctx, rng);
  EXPECT_EQ(seen, PolicyVariant::kAccLow);
}

TEST(RlControllers, AccelPolicyIsWrapped) {
  auto p = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccel));
  RlAccelController c(p);
  std::mt19937_64 rng(0);
  ControlContext ctx;
  ctx.v = 30.0;
  ctx.v_lead = 30.0;
  ctx.gap = 100.0;
  auto out = c.control(ctx, rng);
  EXPECT_DOUBLE_EQ(out.accel, -0.75);
  EXPECT_EQ(out.flag, WrapperFlag::kPass);
  ctx.gap = 20.0;
  out = c.control(ctx, rng);
  EXPECT_EQ(out.accel, -3.0);
  EXPECT_EQ(out.flag, WrapperFlag::kFailsafe);
  ctx.gap = 300.0;
  EXPECT_EQ(c.control(ctx, rng).flag, WrapperFlag::kGapClose);
}

TEST(RlControllers, DisengagedDrivesIdm) {
  auto p = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccel));
  IdmParams idm;
  RlAccelController c(p, {}, idm);
  c.set_engaged(false);
  std::mt19937_64 rng(0);
  ControlContext ctx;
  ctx.v = 20.0;
  ctx.v_lead = 22.0;
  ctx.gap = 35.0;
  EXPECT_DOUBLE_EQ(c.control(ctx, rng).accel, idm_accel(idm, 20.0, 22.0, 35.0));
}

TEST(RlControllers, RejectsWrongPolicy) {
  auto acc = std::make_shared<const Policy>(Policy::zeros(PolicyVariant::kAccLow));
  EXPECT_THROW(RlAccelController{acc}, ConfigError);
  EXPECT_THROW(RlAccelController{nullptr}, ConfigError);
}
