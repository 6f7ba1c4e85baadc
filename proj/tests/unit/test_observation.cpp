#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "wavesim/errors.hpp"
#include "wavesim/observation.hpp"
#include "wavesim/policy.hpp"

using namespace wavesim;

namespace {

bool in_unit_box(const Eigen::VectorXd& x) {
  return x.allFinite() && x.minCoeff() >= -1.0 && x.maxCoeff() <= 1.0;
}

}  // namespace

TEST(ObsAccel, LayoutAndMidRange) {
  std::vector<double> hist = {17.0, 17.5, 18.0, 18.5, 19.0};
  AccelObsInput in;
  in.v = 17.5;
  in.v_lead = 18.0;
  in.gap = 100.0;
  in.h_min = 20.0;
  in.h_max = 130.0;
  in.speed_history = hist;
  in.advice = {17.0, 16.0, 18.0, 19.0, false, false};
  const auto obs = build_obs_accel(in);
  ASSERT_EQ(obs.size(), observation_size(PolicyVariant::kAccel));
  EXPECT_EQ(obs.size(), 14);
  EXPECT_GT(obs.minCoeff(), -1.0);
  EXPECT_LT(obs.maxCoeff(), 1.0);
  EXPECT_DOUBLE_EQ(obs(0), 0.0);
  EXPECT_DOUBLE_EQ(obs(9), 2.0 * 19.0 / 35.0 - 1.0);
}

TEST(ObsAccel, BoundariesSaturate) {
  AccelObsInput in;
  in.v = 35.0;
  in.gap = kNoLeaderGap;
  const auto obs = build_obs_accel(in);
  EXPECT_DOUBLE_EQ(obs(0), 1.0);
  EXPECT_DOUBLE_EQ(obs(2), 1.0);
}

TEST(ObsAccel, EmptyHistoryRepeatsCurrentSpeed) {
  AccelObsInput in;
  in.v = 12.0;
  const auto obs = build_obs_accel(in);
  for (int i = 5; i < 10; ++i) EXPECT_DOUBLE_EQ(obs(i), obs(0));
}

TEST(ObsAcc, LeaderFlagAtEightyMetres) {
  AccObsInput in;
  in.v = 20.0;
  in.has_leader = true;
  in.gap = 79.0;
  EXPECT_EQ(build_obs_acc(in, PolicyVariant::kAccHigh)(3), 1.0);
  in.gap = 81.0;
  EXPECT_EQ(build_obs_acc(in, PolicyVariant::kAccHigh)(3), 0.0);
  in.gap = 10.0;
  in.has_leader = false;
  EXPECT_EQ(build_obs_acc(in, PolicyVariant::kAccHigh)(3), 0.0);
}

TEST(ObsAcc, GapBarEncoding) {
  AccObsInput in;
  for (int bar = 1; bar <= 3; ++bar) {
    in.gap_setting = bar;
    EXPECT_EQ(build_obs_acc(in, PolicyVariant::kAccLow)(5), bar - 2.0);
  }
  in.gap_setting = 4;
  EXPECT_THROW(build_obs_acc(in, PolicyVariant::kAccLow), DomainError);
  EXPECT_THROW(build_obs_acc(AccObsInput{}, PolicyVariant::kAccel), ShapeError);
}

TEST(ObsAcc, StationaryEmptyHistoryPadsWithCurrentSpeed) {
  AccObsInput in;
  in.v = 0.0;
  const auto obs = build_obs_acc(in, PolicyVariant::kAccLow);
  ASSERT_EQ(obs.size(), 34);
  // [6..8] targets, [9..13] accels, [14..23] speeds, [24..33] requests
  for (int i = 14; i < 24; ++i) EXPECT_DOUBLE_EQ(obs(i), obs(0));
  for (int i = 9; i < 14; ++i) EXPECT_DOUBLE_EQ(obs(i), 0.0);
  for (int i = 24; i < 34; ++i) EXPECT_DOUBLE_EQ(obs(i), obs(4));
  EXPECT_EQ(build_obs_acc(in, PolicyVariant::kAccHigh).size(), 12);
}

TEST(ObsAcc, HistoryKeepsMostRecentSamples) {
  std::vector<double> accels = {-3, -2, -1, 0, 1, 2, 3};
  AccObsInput in;
  in.accel_history = accels;
  const auto obs = build_obs_acc(in, PolicyVariant::kAccHigh);
  for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(obs(6 + i), accels[i + 1] / 3.0);
}

TEST(Observation, FuzzStaysInUnitBox) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> speed(-5.0, 50.0), gap(-10.0, 2e6), hmin(-500.0, 500.0),
      accel(-10.0, 10.0), mph(0.0, 100.0), coin(0.0, 1.0);
  std::vector<double> sh(12), ah(12), rh(12);
  for (int i = 0; i < 100000; ++i) {
    const auto len = static_cast<std::size_t>(coin(rng) * 12.0);
    for (std::size_t k = 0; k < 12; ++k) {
      sh[k] = speed(rng);
      ah[k] = accel(rng);
      rh[k] = mph(rng);
    }
    SpeedPlannerAdvice adv{speed(rng), speed(rng), speed(rng), speed(rng), coin(rng) < 0.5, false};

    AccelObsInput a;
    a.v = speed(rng);
    a.v_lead = speed(rng);
    a.gap = gap(rng);
    a.h_min = hmin(rng);
    a.h_max = gap(rng);
    a.speed_history = std::span<const double>(sh.data(), len);
    a.advice = adv;
    ASSERT_TRUE(in_unit_box(build_obs_accel(a)));

    AccObsInput c;
    c.v = speed(rng);
    c.gap = gap(rng);
    c.has_leader = coin(rng) < 0.5;
    c.speed_setting_mph = mph(rng);
    c.gap_setting = 1 + static_cast<int>(coin(rng) * 2.999);
    c.advice = adv;
    c.accel_history = std::span<const double>(ah.data(), len);
    c.speed_history = std::span<const double>(sh.data(), len);
    c.request_history = std::span<const double>(rh.data(), len);
    ASSERT_TRUE(in_unit_box(build_obs_acc(c, PolicyVariant::kAccLow)));
    ASSERT_TRUE(in_unit_box(build_obs_acc(c, PolicyVariant::kAccHigh)));
  }
}
