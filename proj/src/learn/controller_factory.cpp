#include <type_traits>

#include "wavesim/builtin_controllers.hpp"
#include "wavesim/controller_spec.hpp"
#include "wavesim/errors.hpp"
#include "wavesim/rl_controllers.hpp"

namespace wavesim {

const char* controller_kind_name(const ControllerSpec& spec) {
  return std::visit(
      [](const auto& s) -> const char* {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IdmSpec>) return "idm";
        if constexpr (std::is_same_v<T, FollowerStopperSpec>) return "follower_stopper";
        if constexpr (std::is_same_v<T, StockAccSpec>) return "stock_acc";
        if constexpr (std::is_same_v<T, RlAccelSpec>) return "rl_accel";
        if constexpr (std::is_same_v<T, RlAccSpec>) return "rl_acc";
      },
      spec);
}

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::unique_ptr<Controller> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IdmSpec>) {
          return std::make_unique<IdmController>(s.params);
        } else if constexpr (std::is_same_v<T, FollowerStopperSpec>) {
          return std::make_unique<FollowerStopperController>(s.params, s.min_accel, s.max_accel);
        } else if constexpr (std::is_same_v<T, StockAccSpec>) {
          return std::make_unique<AccController>(s.plant, s.settings);
        } else if constexpr (std::is_same_v<T, RlAccelSpec>) {
          return std::make_unique<RlAccelController>(s.policy, s.closing);
        } else {
          return std::make_unique<RlAccController>(s.low_speed, s.high_speed, s.plant,
                                                   s.switch_mph);
        }
      },
      spec);
}

}  // namespace wavesim
