#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <variant>

#include "wavesim/config.hpp"
#include "wavesim/errors.hpp"
#include "wavesim/hash.hpp"

using namespace wavesim;

TEST(KeyValue, ParsesCommentsAndWhitespace) {
  const auto kv = KeyValueConfig::from_string("# header\n  seed = 12  # trailing\n\nav=idm\n");
  EXPECT_EQ(kv.get_int("seed", 0), 12);
  EXPECT_EQ(kv.get_string("av", ""), "idm");
  EXPECT_EQ(kv.get_double("dt", 0.1), 0.1);
}

TEST(KeyValue, RejectsMalformed) {
  EXPECT_THROW(KeyValueConfig::from_string("seed 12\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::from_string("seed = 1\nseed = 2\n"), ConfigError);
  const auto kv = KeyValueConfig::from_string("n = 1.5\nflag = maybe\n");
  EXPECT_THROW(kv.get_int("n", 0), ConfigError);
  EXPECT_THROW(kv.get_bool("flag", false), ConfigError);
}

TEST(KeyValue, UnknownKeysAreReported) {
  const auto kv = KeyValueConfig::from_string("seed = 1\nsede = 2\n");
  kv.get_int("seed", 0);
  EXPECT_EQ(kv.unused_keys(), std::vector<std::string>{"sede"});
  EXPECT_THROW(kv.reject_unknown(), ConfigError);
}

TEST(KeyValue, CanonicalHashIgnoresOrderAndComments) {
  const auto a = KeyValueConfig::from_string("a = 1\nb = 2\n");
  const auto b = KeyValueConfig::from_string("# x\nb=2\n a =1\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), KeyValueConfig::from_string("a = 1\nb = 3\n").hash());
}

TEST(KeyValue, MissingFile) {
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/x.conf"), MissingFile);
}

TEST(Hash, Fnv) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
  EXPECT_THROW(file_hash("/nonexistent/file"), MissingFile);
}

TEST(ScenarioConfig, Defaults) {
  const auto kv = KeyValueConfig::from_string("trajectory.duration = 120\n");
  const ScenarioConfig cfg = scenario_from_config(kv);
  EXPECT_EQ(cfg.n_platoons, 1);
  EXPECT_EQ(cfg.humans_per_platoon, 19);
  EXPECT_NEAR(cfg.leader.duration(), 120.0, 1e-9);
  EXPECT_TRUE(std::holds_alternative<IdmSpec>(cfg.av_controller));
}

TEST(ScenarioConfig, PenetrationSetsPlatoonSize) {
  auto cfg = scenario_from_config(KeyValueConfig::from_string("penetration = 0.04\n"));
  EXPECT_EQ(cfg.humans_per_platoon, 24);
  cfg = scenario_from_config(KeyValueConfig::from_string("penetration = 0.05\n"));
  EXPECT_EQ(cfg.humans_per_platoon, 19);
  EXPECT_THROW(scenario_from_config(
                   KeyValueConfig::from_string("penetration = 0.05\nhumans_per_platoon = 3\n")),
               ConfigError);
  EXPECT_THROW(scenario_from_config(KeyValueConfig::from_string("penetration = 0\n")),
               ConfigError);
}

TEST(ScenarioConfig, Controllers) {
  auto cfg = scenario_from_config(
      KeyValueConfig::from_string("av = follower_stopper\nfs.v_des = auto\n"));
  ASSERT_TRUE(std::holds_alternative<FollowerStopperSpec>(cfg.av_controller));
  EXPECT_NEAR(std::get<FollowerStopperSpec>(cfg.av_controller).params.v_des,
              cfg.leader.mean_speed(), 1e-12);
  cfg = scenario_from_config(
      KeyValueConfig::from_string("av = stock_acc\nacc.speed_mph = 55\nacc.gap_bars = 3\n"));
  ASSERT_TRUE(std::holds_alternative<StockAccSpec>(cfg.av_controller));
  EXPECT_EQ(std::get<StockAccSpec>(cfg.av_controller).settings.gap_setting, 3);
  EXPECT_THROW(scenario_from_config(KeyValueConfig::from_string("av = teleport\n")),
               ConfigError);
  EXPECT_THROW(scenario_from_config(KeyValueConfig::from_string("av = rl_accel\n")),
               ConfigError);
}

TEST(ScenarioConfig, TrajectoryFileRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "wavesim_cfg_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "lead.csv") << "time_s,speed_mps\n0,10\n100,12\n";
    std::ofstream(dir / "s.conf") << "trajectory.file = lead.csv\n";
  }
  const auto cfg = scenario_from_config(KeyValueConfig::load((dir / "s.conf").string()));
  EXPECT_NEAR(cfg.leader.speed_at(50.0), 11.0, 1e-12);
  {
    std::ofstream(dir / "t.conf") << "trajectory.file = missing.csv\n";
  }
  EXPECT_THROW(scenario_from_config(KeyValueConfig::load((dir / "t.conf").string())),
               MissingFile);
  std::filesystem::remove_all(dir);
}

TEST(TrainConfigKeys, Parse) {
  const auto kv = KeyValueConfig::from_string(
      "train.variant = acc_high\ntrain.iterations = 7\nppo.clip = 0.1\nreward.c1 = 0.5\n"
      "policy.hidden = 32\n");
  const TrainConfig cfg = train_from_config(kv);
  EXPECT_EQ(cfg.env.variant, PolicyVariant::kAccHigh);
  EXPECT_EQ(cfg.iterations, 7);
  EXPECT_DOUBLE_EQ(cfg.ppo.clip_eps, 0.1);
  EXPECT_DOUBLE_EQ(cfg.env.acc_reward.c1, 0.5);
  EXPECT_EQ(cfg.shape.hidden, 32);
  EXPECT_NO_THROW(kv.reject_unknown());
  EXPECT_THROW(train_from_config(KeyValueConfig::from_string("train.gamma = 2\n")), ConfigError);
}
