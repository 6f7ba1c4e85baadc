#include "wavesim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "wavesim/errors.hpp"
#include "wavesim/trace.hpp"

namespace wavesim {

void LeaderTrajectory::validate() const {
  if (times.size() < 2 || times.size() != speeds.size()) {
    throw DomainError("trajectory needs at least two (time, speed) samples");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("trajectory times must be strictly increasing");
    }
  }
  for (double v : speeds) {
    if (!(v >= 0.0 && v <= kMaxLeaderSpeed)) {
      throw DomainError("trajectory speed outside [0, 45] m/s");
    }
  }
}

double LeaderTrajectory::speed_at(double t) const {
  constexpr double kEps = 1e-9;
  if (t < times.front() - kEps || t > times.back() + kEps) {
    throw TrajectoryExhausted("leader trajectory has no data at t=" + std::to_string(t));
  }
  if (t <= times.front()) return speeds.front();
  if (t >= times.back()) return speeds.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return speeds[lo] + w * (speeds[hi] - speeds[lo]);
}

LeaderTrajectory LeaderTrajectory::resampled(double dt) const {
  LeaderTrajectory out;
  out.source_id = source_id;
  const double t0 = times.front();
  const auto n = static_cast<std::size_t>(std::floor(duration() / dt + 1e-9));
  out.times.reserve(n + 1);
  out.speeds.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    out.times.push_back(t);
    out.speeds.push_back(speed_at(t));
  }
  return out;
}

LeaderTrajectory LeaderTrajectory::window(double t0, double t1) const {
  LeaderTrajectory base = resampled();
  LeaderTrajectory out;
  out.source_id = source_id;
  const double start = base.times.front() + t0;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / kTrajectoryDt + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const double rel = static_cast<double>(k) * kTrajectoryDt;
    out.times.push_back(rel);
    out.speeds.push_back(base.speed_at(start + rel));
  }
  return out;
}

double LeaderTrajectory::mean_speed() const {
  return std::accumulate(speeds.begin(), speeds.end(), 0.0) /
         static_cast<double>(speeds.size());
}

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  if (name == "freeflow") return TrajectoryKind::kFreeflow;
  if (name == "shockwave") return TrajectoryKind::kShockwave;
  if (name == "bottleneck") return TrajectoryKind::kBottleneck;
  throw ConfigError("unknown trajectory kind '" + std::string(name) + "'");
}

const char* to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kFreeflow:
      return "freeflow";
    case TrajectoryKind::kShockwave:
      return "shockwave";
    case TrajectoryKind::kBottleneck:
      return "bottleneck";
  }
  return "unknown";
}

namespace {

// Half-cosine blend from a to b over [0, length].
double ease(double a, double b, double s, double length) {
  const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * std::clamp(s / length, 0.0, 1.0)));
  return a + (b - a) * w;
}

LeaderTrajectory sample(std::string source_id, double duration, auto&& speed_fn) {
  LeaderTrajectory traj;
  traj.source_id = std::move(source_id);
  const auto n = static_cast<std::size_t>(std::floor(duration / kTrajectoryDt + 1e-9));
  traj.times.reserve(n + 1);
  traj.speeds.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * kTrajectoryDt;
    traj.times.push_back(t);
    traj.speeds.push_back(std::clamp(speed_fn(t), 0.0, kMaxLeaderSpeed));
  }
  return traj;
}

struct Jitter {
  std::array<double, 3> amp{}, period{}, phase{};

  Jitter(std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 3; ++i) {
      amp[i] = amplitude * (0.5 + 0.5 * u01(rng));
      period[i] = 20.0 + 100.0 * u01(rng);
      phase[i] = 2.0 * std::numbers::pi * u01(rng);
    }
  }

  double operator()(double t) const {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      sum += amp[i] * std::sin(2.0 * std::numbers::pi * t / period[i] + phase[i]);
    }
    return sum;
  }
};

LeaderTrajectory make_freeflow(double duration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Jitter jitter(rng, 0.3);
  return sample("synthetic:freeflow:" + std::to_string(seed), duration,
                [&](double t) { return 30.0 + jitter(t); });
}

LeaderTrajectory make_shockwave(double duration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr double kLeadIn = 20.0;
  constexpr double kStopHold = 3.0;
  constexpr double kForcedStopTime = 300.0;

  // Alternating peaks and troughs joined by half-cosine segments.
  struct Extremum {
    double t;
    double v;
    double hold;
  };
  std::vector<Extremum> ext;
  double t = kLeadIn;
  ext.push_back({t, 23.0 + 4.0 * u01(rng), 0.0});
  bool trough = true;
  while (t < duration + 120.0) {
    t += 25.0 + 15.0 * u01(rng);
    if (trough) {
      const bool stop = u01(rng) < 0.25;
      ext.push_back({t, stop ? 0.0 : 4.0 + 2.0 * u01(rng), stop ? kStopHold : 0.0});
    } else {
      ext.push_back({t, 23.0 + 4.0 * u01(rng), 0.0});
    }
    trough = !trough;
  }
  // The trough closest to t = 300 s is always a full stop (troughs sit at odd
  // indices), provided it lies inside the trajectory.
  std::size_t forced = 1;
  for (std::size_t i = 1; i < ext.size(); i += 2) {
    if (std::abs(ext[i].t - kForcedStopTime) < std::abs(ext[forced].t - kForcedStopTime)) {
      forced = i;
    }
  }
  if (ext[forced].t > duration - 5.0) {
    forced = 1;
  }
  ext[forced].v = 0.0;
  ext[forced].hold = kStopHold;
  // Holds shift everything after them.
  double shift = 0.0;
  for (auto& e : ext) {
    e.t += shift;
    shift += e.hold;
  }

  return sample("synthetic:shockwave:" + std::to_string(seed), duration, [&](double tt) {
    if (tt <= ext.front().t) return ext.front().v;
    for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
      const double seg_start = ext[i].t + ext[i].hold;
      if (tt < seg_start) return ext[i].v;
      if (tt < ext[i + 1].t) return ease(ext[i].v, ext[i + 1].v, tt - seg_start,
                                         ext[i + 1].t - seg_start);
    }
    return ext.back().v;
  });
}

LeaderTrajectory make_bottleneck(double duration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Jitter jitter(rng, 0.15);
  // Phase lengths scale with duration so short runs still contain a plateau.
  const double scale = std::min(1.0, duration / 600.0);
  const double cruise = (60.0 + 40.0 * u01(rng)) * scale;
  const double decay = 60.0 * scale;
  const double plateau = std::max(60.0, (180.0 + 60.0 * u01(rng)) * scale);
  const double recover = 90.0 * scale;
  const double cruise_speed = 29.0 + 2.0 * u01(rng);
  const double low_speed = 5.0;
  const double recovered_speed = 27.0 + 3.0 * u01(rng);
  return sample("synthetic:bottleneck:" + std::to_string(seed), duration, [&](double t) {
    double v;
    if (t < cruise) {
      v = cruise_speed;
    } else if (t < cruise + decay) {
      v = ease(cruise_speed, low_speed, t - cruise, decay);
    } else if (t < cruise + decay + plateau) {
      v = low_speed;
    } else {
      v = ease(low_speed, recovered_speed, t - cruise - decay - plateau, recover);
    }
    return v + jitter(t) * std::min(1.0, v / 10.0);
  });
}

}  // namespace

LeaderTrajectory synth_trajectory(TrajectoryKind kind, double duration,
                                  std::uint64_t seed) {
  if (!(duration >= 60.0)) {
    throw DomainError("synthetic trajectories need duration >= 60 s");
  }
  switch (kind) {
    case TrajectoryKind::kFreeflow:
      return make_freeflow(duration, seed);
    case TrajectoryKind::kShockwave:
      return make_shockwave(duration, seed);
    case TrajectoryKind::kBottleneck:
      return make_bottleneck(duration, seed);
  }
  throw DomainError("unknown trajectory kind");
}

LeaderTrajectory dip_trajectory(double cruise_speed, double depth, double duration,
                                double dip_start, double dip_length) {
  const double half = 0.5 * dip_length;
  return sample("synthetic:dip", duration, [&](double t) {
    if (t < dip_start || t > dip_start + dip_length) return cruise_speed;
    const double s = t - dip_start;
    return s < half ? ease(cruise_speed, cruise_speed - depth, s, half)
                    : ease(cruise_speed - depth, cruise_speed, s - half, half);
  });
}

LeaderTrajectory constant_trajectory(double speed, double duration) {
  return sample("synthetic:constant", duration, [&](double) { return speed; });
}

LeaderTrajectory read_trajectory_csv(std::istream& is, std::string source_id) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trajectory CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_s,speed_mps") {
    throw ConfigError("trajectory CSV header must be 'time_s,speed_mps'");
  }
  LeaderTrajectory raw;
  raw.source_id = std::move(source_id);
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    double t = 0.0, v = 0.0;
    char comma = 0;
    if (!(ls >> t >> comma >> v) || comma != ',') {
      throw ConfigError("trajectory CSV line " + std::to_string(line_no) + " is malformed");
    }
    raw.times.push_back(t);
    raw.speeds.push_back(v);
  }
  raw.validate();
  return raw.resampled();
}

LeaderTrajectory load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open trajectory file '" + path + "'");
  return read_trajectory_csv(in, path);
}

void write_trajectory_csv(std::ostream& os, const LeaderTrajectory& traj) {
  os << "time_s,speed_mps\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_double(traj.times[i]) << ',' << format_double(traj.speeds[i]) << '\n';
  }
}

}  // namespace wavesim
