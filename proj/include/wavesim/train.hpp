#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "wavesim/env.hpp"
#include "wavesim/policy.hpp"
#include "wavesim/ppo.hpp"

namespace wavesim {

struct TrainConfig {
  EnvConfig env;
  PpoConfig ppo;
  PolicyShape shape;
  int iterations = 200;
  int episodes_per_iter = 2;
  double gamma = 0.99;
  double lambda = 0.95;
  double reward_scale = 0.05;  // applied to critic targets only
  double init_log_std = -0.5;
  double switch_mph = 60.0;    // composite ACC hand-over speed
  std::uint64_t seed = 0;
  void validate() const;
};

struct CurvePoint {
  int iter = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double system_mpg = 0.0;
};

struct TrainResult {
  Policy best;   // policy whose rollouts had the highest mean return
  Policy last;
  int best_iter = 0;
  std::vector<CurvePoint> curve;
};

using TrainProgress = std::function<void(const CurvePoint&, const PpoStats&)>;

// Deterministic in cfg (including cfg.seed).
TrainResult train(const TrainConfig& cfg, const TrainProgress& progress = {});

inline constexpr const char* kCurveCsvHeader = "iter,mean_return,std_return,system_mpg";
void write_learning_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

}  // namespace wavesim
