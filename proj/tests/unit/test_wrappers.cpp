#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "wavesim/errors.hpp"
#include "wavesim/wrappers.hpp"

using namespace wavesim;

namespace {

// Plain transcription of the three-case law plus the speed clip.
WrappedAccel reference_wrap(double a_raw, double v, double vl, double h, double dt) {
  const double v_diff = (v * (1.0 + 4.0 / 30.0) + 1.0) - vl;
  const double t = v_diff > 0 ? h / v_diff : std::numeric_limits<double>::infinity();
  const double h_max = std::max(120.0, 6.0 * v);
  double a = a_raw;
  WrapperFlag f = WrapperFlag::kPass;
  if (t <= 6.0) {
    a = -3.0;
    f = WrapperFlag::kFailsafe;
  } else if (h >= h_max) {
    a = 1.5;
    f = WrapperFlag::kGapClose;
  }
  a = std::min(std::max(a, -v / dt), (35.0 - v) / dt);
  return {a, f};
}

}  // namespace

TEST(Wrappers, GapClosingThreshold) {
  EXPECT_DOUBLE_EQ(gap_closing_threshold(10.0), 120.0);
  EXPECT_DOUBLE_EQ(gap_closing_threshold(20.0), 120.0);
  EXPECT_DOUBLE_EQ(gap_closing_threshold(30.0), 180.0);
}

TEST(Wrappers, FailsafeThreshold) {
  EXPECT_NEAR(failsafe_threshold(30.0, 30.0), 30.0, 1e-12);
  EXPECT_DOUBLE_EQ(failsafe_threshold(0.0, 0.0), 6.0);
  EXPECT_NEAR(failsafe_threshold(30.0, 40.0), -30.0, 1e-12);
}

TEST(Wrappers, TimeToCollision) {
  EXPECT_NEAR(ttc(30.0, 30.0, 30.0), 6.0, 1e-12);
  EXPECT_NEAR(ttc(30.0, 30.0, 15.0), 3.0, 1e-12);
  EXPECT_TRUE(std::isinf(ttc(10.0, 30.0, 50.0)));
}

TEST(Wrappers, ThreeCases) {
  auto fs = wrap_acceleration(0.0, 30.0, 30.0, 20.0, 0.1);
  EXPECT_EQ(fs.accel, -3.0);
  EXPECT_EQ(fs.flag, WrapperFlag::kFailsafe);
  auto gc = wrap_acceleration(0.0, 30.0, 30.0, 200.0, 0.1);
  EXPECT_EQ(gc.accel, 1.5);
  EXPECT_EQ(gc.flag, WrapperFlag::kGapClose);
  auto pass = wrap_acceleration(0.4, 30.0, 30.0, 100.0, 0.1);
  EXPECT_EQ(pass.accel, 0.4);
  EXPECT_EQ(pass.flag, WrapperFlag::kPass);
}

TEST(Wrappers, RejectsOutOfRangeAction) {
  EXPECT_THROW(wrap_acceleration(-3.01, 10, 10, 50, 0.1), RangeError);
  EXPECT_THROW(wrap_acceleration(1.51, 10, 10, 50, 0.1), RangeError);
  EXPECT_THROW(wrap_acceleration(std::nan(""), 10, 10, 50, 0.1), RangeError);
}

TEST(Wrappers, SpeedLimitClipIsLast) {
  // Gap-closing would push past 35 m/s.
  auto out = wrap_acceleration(0.0, 34.95, 34.95, 500.0, 0.1);
  EXPECT_EQ(out.flag, WrapperFlag::kGapClose);
  EXPECT_NEAR(34.95 + out.accel * 0.1, 35.0, 1e-12);
  // Failsafe at near rest cannot drive speed negative.
  out = wrap_acceleration(0.0, 0.1, 0.0, 1.0, 0.1);
  EXPECT_EQ(out.flag, WrapperFlag::kFailsafe);
  EXPECT_NEAR(0.1 + out.accel * 0.1, 0.0, 1e-12);
}

TEST(Wrappers, FuzzMatchesReferenceBitwise) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> speed(0.0, 35.0), gap(0.1, 400.0),
      action(kActionMinAccel, kActionMaxAccel);
  for (int i = 0; i < 100000; ++i) {
    const double v = speed(rng), vl = speed(rng), h = gap(rng), a = action(rng);
    const auto got = wrap_acceleration(a, v, vl, h, 0.1);
    const auto want = reference_wrap(a, v, vl, h, 0.1);
    ASSERT_EQ(got.accel, want.accel) << v << ' ' << vl << ' ' << h << ' ' << a;
    ASSERT_EQ(got.flag, want.flag);
  }
}

TEST(Wrappers, TriggerFormsAgreeWhenClosing) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> speed(0.0, 35.0), gap(0.1, 400.0);
  int closing = 0;
  for (int i = 0; i < 100000; ++i) {
    const double v = speed(rng), vl = speed(rng), h = gap(rng);
    if (!(closing_speed(v, vl) > 0)) continue;
    ++closing;
    // Compare on the same side of the boundary away from rounding ties.
    const double h_min = failsafe_threshold(v, vl);
    if (std::abs(h - h_min) < 1e-9 * h_min) continue;
    EXPECT_EQ(h <= h_min, ttc(v, vl, h) <= kTtcThreshold);
  }
  EXPECT_GT(closing, 50000);
}

TEST(Wrappers, FailsafeDominatesGapClosing) {
  // Large gap that is still inside the failsafe distance.
  const double v = 35.0, vl = 0.0;
  const double h = 220.0;
  ASSERT_GE(h, gap_closing_threshold(v));
  ASSERT_LE(h, failsafe_threshold(v, vl));
  EXPECT_EQ(wrap_acceleration(1.0, v, vl, h, 0.1).flag, WrapperFlag::kFailsafe);
}

TEST(Wrappers, ClosingCoefficientsAreOverridable) {
  ClosingSpeedCoefficients c{0.0, 0.0};
  EXPECT_DOUBLE_EQ(closing_speed(20.0, 15.0, c), 5.0);
  EXPECT_DOUBLE_EQ(failsafe_threshold(20.0, 15.0, c), 30.0);
}
