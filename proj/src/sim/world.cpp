#include "wavesim/world.hpp"

#include <algorithm>

#include "wavesim/wrappers.hpp"

namespace wavesim {

double WorldState::gap(std::size_t index) const {
  if (index == 0) return kNoLeaderGap;
  const auto& front = vehicles[index - 1];
  return front.position - vehicles[index].position - front.length;
}

int WorldState::next_vehicle_id() const {
  int max_id = -1;
  for (const auto& v : vehicles) max_id = std::max(max_id, v.id);
  return max_id + 1;
}

}  // namespace wavesim
