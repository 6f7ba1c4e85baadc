#pragma once

#include <map>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <span>
#include <vector>

namespace wavesim {

inline constexpr double kDefaultAdviceSpeed = 30.0;

struct SpeedPlannerAdvice {
  double v_sp = kDefaultAdviceSpeed;
  double v_200 = kDefaultAdviceSpeed;
  double v_500 = kDefaultAdviceSpeed;
  double v_1000 = kDefaultAdviceSpeed;
  bool max_headway_flag = false;
  bool is_default = true;  // feed was cold when queried
};

struct SegmentFeedParams {
  double segment_length = 650.0;     // [m], within [500, 800]
  double aggregation_window = 60.0;  // [s]
  double latency = 180.0;            // [s]
  bool max_headway_flag = false;

  void validate() const;
};

// Segment-averaged speed feed built from simulated vehicles. Samples are
// accumulated over an aggregation window; each closed window publishes one
// mean speed per occupied segment, stamped with the window end time.
// Appends must come from a single writer with non-decreasing timestamps;
// queries may run concurrently.
class SegmentFeed {
 public:
  struct Row {
    double t;  // window end time
    long segment_idx;
    double mean_speed;
  };

  explicit SegmentFeed(SegmentFeedParams params = {});

  const SegmentFeedParams& params() const { return params_; }

  // Adds one speed sample per vehicle at time t. Closes any window that ended
  // at or before t.
  void record(double t, std::span<const double> positions,
              std::span<const double> speeds);

  long segment_of(double position) const;

  // Advice at `position` using only windows published at or before
  // time - latency; default advice when none exist.
  SpeedPlannerAdvice query(double position, double time) const;

  std::vector<Row> rows() const;
  void write_csv(std::ostream& os) const;

 private:
  void flush_window(double window_end);
  double smoothed_speed(const std::map<long, double>& snapshot, long seg) const;

  SegmentFeedParams params_;
  mutable std::shared_mutex mutex_;
  std::vector<Row> rows_;
  // Published snapshots keyed by window end time.
  std::map<double, std::map<long, double>> snapshots_;
  std::map<long, std::pair<double, long>> pending_;
  double window_start_ = 0.0;
  bool started_ = false;
};

SpeedPlannerAdvice speed_planner_query(const SegmentFeed& feed, double position,
                                       double time);

}  // namespace wavesim
