#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wavesim/errors.hpp"
#include "wavesim/reward.hpp"

using namespace wavesim;

TEST(RewardAccel, AllTermsVanish) {
  std::vector<double> e(5, 0.0);
  EXPECT_EQ(reward_accel({}, e, 0.0, 8.0, 20.0, 5.0, 120.0), 0.0);
}

TEST(RewardAccel, GapIndicatorOnly) {
  AccelRewardCoefficients c;
  std::vector<double> e(3, 0.0);
  EXPECT_DOUBLE_EQ(reward_accel(c, e, 0.0, 4.0, 0.5, 6.0, 120.0), -c.c3);
}

TEST(RewardAccel, TimeGapTerm) {
  AccelRewardCoefficients c;
  std::vector<double> e(3, 0.0);
  EXPECT_DOUBLE_EQ(reward_accel(c, e, 0.0, 60.0, 30.0, 30.0, 180.0), -c.c4 * 2.0);
}

TEST(RewardAcc, BaseReward) {
  std::vector<double> e(4, 0.0);
  EXPECT_EQ(reward_acc({}, 0.0, 20.0, 20.0, e, 50.0, 10.0, 120.0), 1.0);
}

TEST(RewardAcc, TrackingTerm) {
  AccRewardCoefficients c;
  std::vector<double> e(4, 0.0);
  EXPECT_DOUBLE_EQ(reward_acc(c, 0.0, 22.0, 20.0, e, 50.0, 10.0, 120.0), 1.0 - 4.0 * c.c2);
}

TEST(RewardAcc, InterventionIndicator) {
  AccRewardCoefficients c;
  std::vector<double> e(4, 0.0);
  EXPECT_DOUBLE_EQ(reward_acc(c, 0.0, 20.0, 20.0, e, 120.0, 10.0, 120.0), 1.0 - c.c4);
  EXPECT_DOUBLE_EQ(reward_acc(c, 0.0, 20.0, 20.0, e, 10.0, 10.0, 120.0), 1.0 - c.c4);
}

TEST(Reward, ClosedFormOnRandomInputs) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(u(rng) * 25);
    std::vector<double> e(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& x : e) {
      x = 3.0 * u(rng);
      sum += x;
    }
    const double a = -3.0 + 4.5 * u(rng), v = 35.0 * u(rng), v_sp = 35.0 * u(rng);
    const double h = 200.0 * u(rng), h_min = -30.0 + 80.0 * u(rng), h_max = 120.0 + 60.0 * u(rng);

    AccelRewardCoefficients ca{u(rng), u(rng), u(rng), u(rng)};
    const double want_a = -ca.c1 * sum / n - ca.c2 * a * a -
                          ca.c3 * ((h < h_min || h > h_max) ? 1.0 : 0.0) -
                          ca.c4 * ((h > 10.0 && v > 1.0) ? h / v : 0.0);
    EXPECT_NEAR(reward_accel(ca, e, a, h, v, h_min, h_max), want_a, 1e-12);

    AccRewardCoefficients cc{u(rng), u(rng), u(rng), u(rng)};
    const double want_c = 1.0 - cc.c1 * a * a - cc.c2 * (v - v_sp) * (v - v_sp) -
                          cc.c3 / n * sum - cc.c4 * ((h <= h_min || h >= h_max) ? 1.0 : 0.0);
    EXPECT_NEAR(reward_acc(cc, a, v, v_sp, e, h, h_min, h_max), want_c, 1e-12);
  }
}

TEST(Reward, Validation) {
  std::vector<double> empty;
  EXPECT_THROW(reward_accel({}, empty, 0, 0, 0, 0, 120), DomainError);
  EXPECT_THROW(reward_acc({}, 0, 0, 0, empty, 0, 0, 120), DomainError);
  AccelRewardCoefficients bad;
  bad.c2 = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  AccRewardCoefficients nan;
  nan.c1 = std::nan("");
  EXPECT_THROW(nan.validate(), ConfigError);
}
