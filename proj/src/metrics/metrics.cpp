#include "wavesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "wavesim/energy.hpp"
#include "wavesim/errors.hpp"

namespace wavesim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : kNaN; }
  double stddev() const {
    if (!n) return kNaN;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - m * m));
  }
};

// Rows grouped per time step (rows of one step are contiguous).
template <typename F>
void for_each_step(const SimulationTrace& trace, F&& f) {
  std::size_t i = 0;
  const auto& rows = trace.rows;
  while (i < rows.size()) {
    std::size_t j = i + 1;
    while (j < rows.size() && rows[j].t == rows[i].t) ++j;
    f(std::span<const TraceRow>(rows.data() + i, j - i));
    i = j;
  }
}

}  // namespace

std::vector<VehicleStats> per_vehicle_stats(const SimulationTrace& trace) {
  if (trace.rows.empty()) throw DomainError("per_vehicle_stats needs a non-empty trace");
  std::map<int, std::size_t> slot;
  std::vector<VehicleStats> out;
  std::vector<Moments> speed, gap;
  for (const auto& r : trace.rows) {
    auto [it, fresh] = slot.emplace(r.veh_id, out.size());
    if (fresh) {
      out.push_back({});
      out.back().veh_id = r.veh_id;
      out.back().is_av = r.is_av;
      speed.emplace_back();
      gap.emplace_back();
    }
    const std::size_t k = it->second;
    speed[k].add(r.speed);
    if (!std::isnan(r.gap)) gap[k].add(r.gap);
    out[k].distance += trace.row_distance(r);
    out[k].fuel += r.fuel * trace.dt;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].samples = speed[k].n;
    out[k].speed_mean = speed[k].mean();
    out[k].speed_std = speed[k].stddev();
    out[k].gap_mean = gap[k].mean();
    out[k].mpg = mpg_from_grams(out[k].distance, out[k].fuel);
  }
  return out;
}

double default_throughput_ref(const SimulationTrace& trace) {
  for (const auto& r : trace.rows) {
    if (r.veh_id == 0) return r.pos;
  }
  return trace.rows.empty() ? 0.0 : trace.rows.front().pos;
}

double throughput(const SimulationTrace& trace, double x_ref) {
  if (trace.rows.empty() || trace.steps == 0) return 0.0;
  std::size_t crossings = 0;
  for (const auto& r : trace.rows) {
    if (r.veh_id == 0) continue;
    const double next = r.pos + trace.row_distance(r);
    if (r.pos < x_ref && next >= x_ref) ++crossings;
  }
  const double hours = static_cast<double>(trace.steps) * trace.dt / 3600.0;
  return static_cast<double>(crossings) / hours;
}

MetricsReport compute_metrics(const SimulationTrace& trace) {
  return compute_metrics(trace, default_throughput_ref(trace));
}

MetricsReport compute_metrics(const SimulationTrace& trace, double x_ref) {
  MetricsReport rep;
  rep.vehicles = per_vehicle_stats(trace);
  Moments speed;
  std::size_t av_rows = 0, follower_rows = 0, fs = 0, gc = 0, eb = 0;
  for (const auto& r : trace.rows) {
    if (r.veh_id == 0) continue;
    ++follower_rows;
    speed.add(r.speed);
    rep.system_distance += trace.row_distance(r);
    rep.system_fuel += r.fuel * trace.dt;
    if (r.flag == WrapperFlag::kEmergencyBrake) ++eb;
    if (!r.is_av) continue;
    ++av_rows;
    if (r.flag == WrapperFlag::kFailsafe) ++fs;
    if (r.flag == WrapperFlag::kGapClose) ++gc;
  }
  rep.system_mpg = mpg_from_grams(rep.system_distance, rep.system_fuel);
  rep.mean_speed = speed.mean();
  rep.speed_std = speed.stddev();
  rep.throughput_ref = x_ref;
  rep.throughput = throughput(trace, x_ref);
  if (av_rows) {
    rep.av_wrappers.failsafe = static_cast<double>(fs) / static_cast<double>(av_rows);
    rep.av_wrappers.gap_close = static_cast<double>(gc) / static_cast<double>(av_rows);
  }
  if (follower_rows) {
    rep.av_wrappers.emergency = static_cast<double>(eb) / static_cast<double>(follower_rows);
  }
  return rep;
}

std::vector<AnnotatedSample> distance_to_nearest_av(const SimulationTrace& trace) {
  std::vector<AnnotatedSample> out;
  std::vector<double> av_pos;
  for_each_step(trace, [&](std::span<const TraceRow> step) {
    av_pos.clear();
    for (const auto& r : step) {
      if (r.is_av) av_pos.push_back(r.pos);
    }
    std::sort(av_pos.begin(), av_pos.end());
    for (const auto& r : step) {
      if (r.is_av || r.veh_id == 0) continue;
      AnnotatedSample s{r.t, r.veh_id, std::nullopt, r.speed, r.accel, r.fuel};
      const auto it = std::upper_bound(av_pos.begin(), av_pos.end(), r.pos);
      if (it != av_pos.end()) s.distance = *it - r.pos;
      out.push_back(s);
    }
  });
  return out;
}

const AvBin* BinnedAvStats::bin_at(double distance) const {
  if (distance < 0 || bin_width <= 0) return nullptr;
  const auto k = static_cast<std::size_t>(std::floor(distance / bin_width));
  return k < bins.size() ? &bins[k] : nullptr;
}

BinnedAvStats binned_stats(std::span<const AnnotatedSample> samples, double bin_width) {
  if (samples.empty()) throw DomainError("binned_stats needs samples");
  if (!(bin_width > 0)) throw DomainError("bin width must be positive");
  BinnedAvStats out;
  out.bin_width = bin_width;
  out.sample_count = samples.size();
  std::vector<Moments> sp, fu;
  for (const auto& s : samples) {
    if (!s.distance) {
      ++out.unassigned;
      continue;
    }
    const auto k = static_cast<std::size_t>(std::floor(std::max(0.0, *s.distance) / bin_width));
    if (sp.size() <= k) {
      sp.resize(k + 1);
      fu.resize(k + 1);
    }
    sp[k].add(s.speed);
    fu[k].add(s.fuel);
  }
  out.bins.resize(sp.size());
  for (std::size_t k = 0; k < sp.size(); ++k) {
    auto& b = out.bins[k];
    b.lo = bin_width * static_cast<double>(k);
    b.hi = b.lo + bin_width;
    b.count = sp[k].n;
    b.speed_mean = sp[k].mean();
    b.speed_std = sp[k].stddev();
    b.fuel_mean = fu[k].mean();
    b.fuel_std = fu[k].stddev();
  }
  return out;
}

VaDeterminant va_gaussian_det(std::span<const std::pair<double, double>> points,
                              double v_split) {
  VaDeterminant out;
  for (const auto& [v, a] : points) {
    if (v < v_split) {
      out.mean += Eigen::Vector2d(v, a);
      ++out.count;
    }
  }
  if (out.count < 3) {
    throw DegenerateCluster("need at least 3 points below " + std::to_string(v_split) +
                            " m/s, got " + std::to_string(out.count));
  }
  const double n = static_cast<double>(out.count);
  out.mean /= n;
  for (const auto& [v, a] : points) {
    if (v < v_split) {
      const Eigen::Vector2d d = Eigen::Vector2d(v, a) - out.mean;
      out.cov += d * d.transpose();
    }
  }
  out.cov /= n;
  out.det = std::max(0.0, out.cov.determinant());
  return out;
}

std::vector<std::size_t> SpeedHistogram::local_maxima(double min_freq) const {
  std::vector<std::size_t> peaks;
  const std::size_t n = freq.size();
  for (std::size_t k = 0; k < n; ++k) {
    const bool left = k == 0 || freq[k] > freq[k - 1];
    const bool right = k + 1 == n || freq[k] > freq[k + 1];
    if (left && right && freq[k] > min_freq) peaks.push_back(k);
  }
  return peaks;
}

SpeedHistogram speed_histogram(const SimulationTrace& trace, double bin_width,
                               std::size_t decimation) {
  if (!(bin_width > 0)) throw DomainError("histogram bin width must be positive");
  if (decimation == 0) throw DomainError("decimation must be >= 1");
  SpeedHistogram h;
  h.bin_width = bin_width;
  std::size_t seen = 0;
  for (const auto& r : trace.rows) {
    if (r.veh_id == 0) continue;
    if (seen++ % decimation != 0) continue;
    const auto k = static_cast<std::size_t>(std::floor(std::max(0.0, r.speed) / bin_width));
    if (h.counts.size() <= k) h.counts.resize(k + 1, 0);
    ++h.counts[k];
    ++h.total;
  }
  if (h.total == 0) throw DomainError("speed_histogram needs follower rows");
  h.freq.resize(h.counts.size());
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    h.freq[k] = static_cast<double>(h.counts[k]) / static_cast<double>(h.total);
  }
  return h;
}

TimeSpaceGrid time_space_grid(const SimulationTrace& trace, double cell_m, double cell_s) {
  if (trace.rows.empty()) throw DomainError("time_space_grid needs a non-empty trace");
  if (!(cell_m > 0) || !(cell_s > 0)) throw DomainError("grid cells must be positive");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double t_lo = x_lo, t_hi = -x_lo;
  for (const auto& r : trace.rows) {
    x_lo = std::min(x_lo, r.pos);
    x_hi = std::max(x_hi, r.pos);
    t_lo = std::min(t_lo, r.t);
    t_hi = std::max(t_hi, r.t);
  }
  TimeSpaceGrid g;
  g.x0 = std::floor(x_lo / cell_m) * cell_m;
  g.t0 = std::floor(t_lo / cell_s + 1e-9) * cell_s;
  g.dx = cell_m;
  g.dt = cell_s;
  const auto nx = static_cast<Eigen::Index>(std::floor((x_hi - g.x0) / cell_m)) + 1;
  const auto nt = static_cast<Eigen::Index>(std::floor((t_hi - g.t0) / cell_s + 1e-9)) + 1;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(nx, nt);
  Eigen::MatrixXi cnt = Eigen::MatrixXi::Zero(nx, nt);
  for (const auto& r : trace.rows) {
    const auto ix = std::min<Eigen::Index>(nx - 1, static_cast<Eigen::Index>(std::floor((r.pos - g.x0) / cell_m)));
    const auto it = std::min<Eigen::Index>(nt - 1, static_cast<Eigen::Index>(std::floor((r.t - g.t0) / cell_s + 1e-9)));
    sum(ix, it) += r.speed;
    ++cnt(ix, it);
  }
  g.speed.resize(nx, nt);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < nt; ++j) {
      g.speed(i, j) = cnt(i, j) ? sum(i, j) / cnt(i, j) : kNaN;
    }
  }
  return g;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("spearman inputs differ in length");
  if (x.size() < 2) throw DomainError("spearman needs at least two points");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

void write_vehicle_stats_csv(std::ostream& os, const std::vector<VehicleStats>& stats) {
  os << "veh_id,is_av,samples,speed_mean_mps,speed_std_mps,gap_mean_m,distance_m,fuel_g,mpg\n";
  for (const auto& s : stats) {
    os << s.veh_id << ',' << (s.is_av ? 1 : 0) << ',' << s.samples << ','
       << format_double(s.speed_mean) << ',' << format_double(s.speed_std) << ','
       << format_double(s.gap_mean) << ',' << format_double(s.distance) << ','
       << format_double(s.fuel) << ',' << format_double(s.mpg) << '\n';
  }
}

void write_metrics_report_csv(std::ostream& os, const MetricsReport& r) {
  os << "metric,value\n";
  auto row = [&](const char* k, double v) { os << k << ',' << format_double(v) << '\n'; };
  row("system_mpg", r.system_mpg);
  row("system_distance_m", r.system_distance);
  row("system_fuel_g", r.system_fuel);
  row("mean_speed_mps", r.mean_speed);
  row("speed_std_mps", r.speed_std);
  row("throughput_vph", r.throughput);
  row("throughput_ref_m", r.throughput_ref);
  row("av_failsafe_rate", r.av_wrappers.failsafe);
  row("av_gap_close_rate", r.av_wrappers.gap_close);
  row("emergency_brake_rate", r.av_wrappers.emergency);
}

void write_binned_stats_csv(std::ostream& os, const BinnedAvStats& stats) {
  os << "bin_lo_m,bin_hi_m,count,speed_mean_mps,speed_std_mps,fuel_mean_gps,fuel_std_gps\n";
  for (const auto& b : stats.bins) {
    os << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << ','
       << format_double(b.speed_mean) << ',' << format_double(b.speed_std) << ','
       << format_double(b.fuel_mean) << ',' << format_double(b.fuel_std) << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const SpeedHistogram& hist) {
  os << "bin_lo_mps,bin_hi_mps,count,frequency\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    const double lo = hist.bin_width * static_cast<double>(k);
    os << format_double(lo) << ',' << format_double(lo + hist.bin_width) << ',' << hist.counts[k]
       << ',' << format_double(hist.freq[k]) << '\n';
  }
}

void write_time_space_csv(std::ostream& os, const TimeSpaceGrid& grid) {
  // header: position cell start, then one column per time cell start
  os << "x_m";
  for (Eigen::Index j = 0; j < grid.speed.cols(); ++j) {
    os << ',' << format_double(grid.t0 + grid.dt * static_cast<double>(j));
  }
  os << '\n';
  for (Eigen::Index i = 0; i < grid.speed.rows(); ++i) {
    os << format_double(grid.x0 + grid.dx * static_cast<double>(i));
    for (Eigen::Index j = 0; j < grid.speed.cols(); ++j) os << ',' << format_double(grid.speed(i, j));
    os << '\n';
  }
}

}  // namespace wavesim
