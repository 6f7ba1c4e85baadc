#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wavesim/errors.hpp"
#include "wavesim/setpoint.hpp"

using namespace wavesim;

namespace {

std::vector<double> flat(double mph) { return std::vector<double>(10, mph); }

}  // namespace

TEST(ClipSpeedSetting, UpperBoundAroundMean) {
  EXPECT_NEAR(clip_speed_setting(70.0, flat(50.0)), 55.0, 1e-3);
}

TEST(ClipSpeedSetting, LowerBoundAroundMean) {
  EXPECT_NEAR(clip_speed_setting(10.0, flat(50.0)), 35.0, 1e-3);
}

TEST(ClipSpeedSetting, GlobalFloor) {
  EXPECT_NEAR(clip_speed_setting(0.0, flat(10.0)), 20.0, 1e-3);
}

TEST(ClipSpeedSetting, GlobalCeiling) {
  EXPECT_DOUBLE_EQ(clip_speed_setting(90.0, flat(72.0)), 73.0);
}

TEST(ClipSpeedSetting, UsesMostRecentTen) {
  std::vector<double> h(15, 0.0);
  for (int i = 5; i < 15; ++i) h[i] = 40.0;
  EXPECT_DOUBLE_EQ(clip_speed_setting(70.0, h), 45.0);
}

TEST(ClipSpeedSetting, ShortHistoryThrows) {
  std::vector<double> h(9, 40.0);
  EXPECT_THROW(clip_speed_setting(50.0, h), InsufficientHistory);
}

TEST(ClipSpeedSetting, IdempotentAndBounded) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mph(0.0, 90.0), raw(-20.0, 120.0);
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> h(10);
    for (auto& x : h) x = mph(rng);
    const double once = clip_speed_setting(raw(rng), h);
    EXPECT_GE(once, 20.0);
    EXPECT_LE(once, 73.0);
    EXPECT_EQ(clip_speed_setting(once, h), once);
  }
}

TEST(EstimateAccel, ConstantSpeed) {
  std::vector<double> v(8, 12.0);
  EXPECT_DOUBLE_EQ(estimate_accel(v), 0.0);
}

TEST(EstimateAccel, UnitRamp) {
  std::vector<double> v;
  for (int i = 0; i < 7; ++i) v.push_back(10.0 + 0.1 * i);
  EXPECT_NEAR(estimate_accel(v), 1.0, 1e-9);
}

TEST(EstimateAccel, MeanOfLastFourDifferences) {
  const std::vector<double> v = {5.0, 10.0, 10.1, 10.3, 10.6, 11.0};
  EXPECT_NEAR(estimate_accel(v), 2.5, 1e-3);
}

TEST(EstimateAccel, NeedsFiveSamples) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_THROW(estimate_accel(v), InsufficientHistory);
}

TEST(EstimateAccel, ExactOnAffineAndBoundedByLargestStep) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), base(0.0, 30.0);
  for (int i = 0; i < 5000; ++i) {
    const double slope = 3.0 * u(rng), v0 = base(rng);
    std::vector<double> affine, noisy;
    double x = v0;
    for (int k = 0; k < 9; ++k) {
      affine.push_back(v0 + slope * 0.1 * k);
      noisy.push_back(x);
      x += 0.3 * u(rng);
    }
    EXPECT_NEAR(estimate_accel(affine), slope, 1e-9);
    double max_step = 0.0;
    for (std::size_t k = 1; k < noisy.size(); ++k) {
      max_step = std::max(max_step, std::abs(noisy[k] - noisy[k - 1]));
    }
    EXPECT_LE(std::abs(estimate_accel(noisy)), max_step / 0.1 + 1e-9);
  }
}
