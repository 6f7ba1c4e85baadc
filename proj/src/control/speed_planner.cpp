#include "wavesim/speed_planner.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "wavesim/errors.hpp"

namespace wavesim {

void SegmentFeedParams::validate() const {
  if (!(segment_length >= 500.0 && segment_length <= 800.0)) {
    throw DomainError("segment length must lie in [500, 800] m");
  }
  if (!(aggregation_window > 0)) throw DomainError("aggregation window must be > 0");
  if (!(latency >= 0)) throw DomainError("feed latency must be >= 0");
}

SegmentFeed::SegmentFeed(SegmentFeedParams params) : params_(params) {
  params_.validate();
}

long SegmentFeed::segment_of(double position) const {
  return static_cast<long>(std::floor(position / params_.segment_length));
}

void SegmentFeed::flush_window(double window_end) {
  std::map<long, double> snapshot;
  for (const auto& [seg, acc] : pending_) {
    const double mean = acc.first / static_cast<double>(acc.second);
    snapshot[seg] = mean;
    rows_.push_back({window_end, seg, mean});
  }
  if (!snapshot.empty()) snapshots_[window_end] = std::move(snapshot);
  pending_.clear();
}

void SegmentFeed::record(double t, std::span<const double> positions,
                         std::span<const double> speeds) {
  std::unique_lock lock(mutex_);
  if (!started_) {
    window_start_ = std::floor(t / params_.aggregation_window) * params_.aggregation_window;
    started_ = true;
  }
  // Small tolerance keeps accumulated step times from straddling a boundary.
  constexpr double kEps = 1e-9;
  while (t >= window_start_ + params_.aggregation_window - kEps) {
    window_start_ += params_.aggregation_window;
    flush_window(window_start_);
  }
  const std::size_t n = std::min(positions.size(), speeds.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto& acc = pending_[segment_of(positions[i])];
    acc.first += speeds[i];
    acc.second += 1;
  }
}

double SegmentFeed::smoothed_speed(const std::map<long, double>& snapshot,
                                   long seg) const {
  // Segments with no vehicles borrow the nearest occupied segment.
  auto nearest = [&](long s) {
    auto it = snapshot.lower_bound(s);
    if (it == snapshot.end()) return std::prev(it)->second;
    if (it->first == s || it == snapshot.begin()) return it->second;
    auto before = std::prev(it);
    return (s - before->first <= it->first - s) ? before->second : it->second;
  };
  const double mean = (nearest(seg - 1) + nearest(seg) + nearest(seg + 1)) / 3.0;
  return std::clamp(mean, 0.0, 35.0);
}

SpeedPlannerAdvice SegmentFeed::query(double position, double time) const {
  std::shared_lock lock(mutex_);
  SpeedPlannerAdvice advice;
  advice.max_headway_flag = params_.max_headway_flag;
  const double cutoff = time - params_.latency;
  auto it = snapshots_.upper_bound(cutoff + 1e-9);
  if (it == snapshots_.begin()) return advice;
  const auto& snapshot = std::prev(it)->second;
  advice.v_sp = smoothed_speed(snapshot, segment_of(position));
  advice.v_200 = smoothed_speed(snapshot, segment_of(position + 200.0));
  advice.v_500 = smoothed_speed(snapshot, segment_of(position + 500.0));
  advice.v_1000 = smoothed_speed(snapshot, segment_of(position + 1000.0));
  advice.is_default = false;
  return advice;
}

std::vector<SegmentFeed::Row> SegmentFeed::rows() const {
  std::shared_lock lock(mutex_);
  return rows_;
}

void SegmentFeed::write_csv(std::ostream& os) const {
  std::shared_lock lock(mutex_);
  os << "t,segment_idx,mean_speed_mps\n";
  os << std::setprecision(17);
  for (const auto& row : rows_) {
    os << row.t << ',' << row.segment_idx << ',' << row.mean_speed << '\n';
  }
}

SpeedPlannerAdvice speed_planner_query(const SegmentFeed& feed, double position,
                                       double time) {
  return feed.query(position, time);
}

}  // namespace wavesim
