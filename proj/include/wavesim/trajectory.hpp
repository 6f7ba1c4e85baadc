#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wavesim {

inline constexpr double kTrajectoryDt = 0.1;
inline constexpr double kMaxLeaderSpeed = 45.0;

// Timestamped speed profile replayed by the platoon leader.
struct LeaderTrajectory {
  std::vector<double> times;   // [s], strictly increasing
  std::vector<double> speeds;  // [m/s], within [0, 45]
  std::string source_id;

  void validate() const;
  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
  double duration() const { return times.back() - times.front(); }

  // Linear interpolation; throws TrajectoryExhausted outside the sample span.
  double speed_at(double t) const;

  // Linear resampling onto a uniform grid starting at start_time().
  LeaderTrajectory resampled(double dt = kTrajectoryDt) const;

  // Sub-range [t0, t1] re-based to start at time 0.
  LeaderTrajectory window(double t0, double t1) const;

  double mean_speed() const;
};

enum class TrajectoryKind { kFreeflow, kShockwave, kBottleneck };

TrajectoryKind parse_trajectory_kind(std::string_view name);
const char* to_string(TrajectoryKind kind);

// Synthetic leader profiles on the 0.1 s grid. Throws DomainError when
// duration < 60 s.
//   freeflow:   ~30 m/s with sub-1 m/s jitter
//   shockwave:  smooth oscillation between ~5 and ~25 m/s; the trough nearest
//               t = 300 s (and occasional others) is a momentary full stop
//   bottleneck: cruise, decay to a ~5 m/s plateau, recovery
LeaderTrajectory synth_trajectory(TrajectoryKind kind, double duration,
                                  std::uint64_t seed);

// Constant cruise with a single smooth dip of `depth` starting at `dip_start`.
LeaderTrajectory dip_trajectory(double cruise_speed, double depth, double duration,
                                double dip_start = 20.0, double dip_length = 20.0);

LeaderTrajectory constant_trajectory(double speed, double duration);

// CSV with header `time_s,speed_mps`. Loaded data is resampled to 0.1 s.
LeaderTrajectory read_trajectory_csv(std::istream& is, std::string source_id = "csv");
LeaderTrajectory load_trajectory_csv(const std::string& path);
void write_trajectory_csv(std::ostream& os, const LeaderTrajectory& traj);

}  // namespace wavesim
