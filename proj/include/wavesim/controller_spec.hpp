#pragma once

#include <memory>
#include <string>
#include <variant>

#include "wavesim/acc_plant.hpp"
#include "wavesim/controller.hpp"
#include "wavesim/follower_stopper.hpp"
#include "wavesim/idm.hpp"
#include "wavesim/wrappers.hpp"

namespace wavesim {

class Policy;

struct IdmSpec {
  IdmParams params;
};

struct FollowerStopperSpec {
  FsParams params;
  double min_accel = -3.0;
  double max_accel = 1.5;
};

struct StockAccSpec {
  AccPlantParams plant;
  AccSettings settings = AccSettings::from_mph(kAccMaxSpeedMph, 2);
};

// Acceleration policy behind failsafe / gap-closing wrappers.
struct RlAccelSpec {
  std::shared_ptr<const Policy> policy;
  ClosingSpeedCoefficients closing;
};

// ACC set-point policies: the low-speed policy below switch_mph, the
// high-speed one at or above. Either may be null, in which case the other is
// used at all speeds.
struct RlAccSpec {
  std::shared_ptr<const Policy> low_speed;
  std::shared_ptr<const Policy> high_speed;
  AccPlantParams plant;
  double switch_mph = 60.0;
  ClosingSpeedCoefficients closing;
};

using ControllerSpec =
    std::variant<IdmSpec, FollowerStopperSpec, StockAccSpec, RlAccelSpec, RlAccSpec>;

const char* controller_kind_name(const ControllerSpec& spec);

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec);

}  // namespace wavesim
