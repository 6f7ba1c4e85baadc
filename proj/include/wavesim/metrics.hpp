#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wavesim/trace.hpp"

namespace wavesim {

// Population variance is used throughout.

struct VehicleStats {
  int veh_id = 0;
  bool is_av = false;
  std::size_t samples = 0;
  double speed_mean = 0.0;
  double speed_std = 0.0;
  double gap_mean = 0.0;  // NaN for the trajectory leader
  double distance = 0.0;  // [m]
  double fuel = 0.0;      // [g]
  double mpg = 0.0;
};

// One entry per vehicle, in platoon order (front to back as first seen).
std::vector<VehicleStats> per_vehicle_stats(const SimulationTrace& trace);

struct WrapperRates {
  double failsafe = 0.0;
  double gap_close = 0.0;
  double emergency = 0.0;  // over all follower rows
};

// Aggregates over followers; the trajectory leader (id 0) is replayed data and
// is excluded from system figures.
struct MetricsReport {
  std::vector<VehicleStats> vehicles;
  double system_distance = 0.0;  // [m]
  double system_fuel = 0.0;      // [g]
  double system_mpg = 0.0;
  double mean_speed = 0.0;
  double speed_std = 0.0;
  double throughput = 0.0;  // [veh/h]
  double throughput_ref = 0.0;
  WrapperRates av_wrappers;  // fractions of AV rows
};

MetricsReport compute_metrics(const SimulationTrace& trace);
MetricsReport compute_metrics(const SimulationTrace& trace, double x_ref);

// Followers crossing x_ref per hour of trace time.
double throughput(const SimulationTrace& trace, double x_ref);
// Starting position of the trajectory leader.
double default_throughput_ref(const SimulationTrace& trace);

struct AnnotatedSample {
  double t = 0.0;
  int veh_id = 0;
  std::optional<double> distance;  // to the nearest AV downstream [m]
  double speed = 0.0;
  double accel = 0.0;
  double fuel = 0.0;
};

// One sample per (step, human follower).
std::vector<AnnotatedSample> distance_to_nearest_av(const SimulationTrace& trace);

struct AvBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double speed_mean = 0.0;
  double speed_std = 0.0;
  double fuel_mean = 0.0;
  double fuel_std = 0.0;
};

struct BinnedAvStats {
  double bin_width = 50.0;
  std::vector<AvBin> bins;     // contiguous from 0
  std::size_t sample_count = 0;
  std::size_t unassigned = 0;  // samples with no AV ahead
  const AvBin* bin_at(double distance) const;
};

BinnedAvStats binned_stats(std::span<const AnnotatedSample> samples, double bin_width = 50.0);

struct VaDeterminant {
  double det = 0.0;
  std::size_t count = 0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

// Covariance determinant of the (v, a) points with v < v_split. Throws
// DegenerateCluster with fewer than three such points.
VaDeterminant va_gaussian_det(std::span<const std::pair<double, double>> points,
                              double v_split = 23.0);

struct SpeedHistogram {
  double bin_width = 1.0;
  std::vector<std::size_t> counts;  // bin k covers [k w, (k + 1) w)
  std::vector<double> freq;
  std::size_t total = 0;
  // Interior bins strictly larger than both neighbours (ends compare to one).
  std::vector<std::size_t> local_maxima(double min_freq = 0.0) const;
};

// Follower speeds; every `decimation`-th row is kept.
SpeedHistogram speed_histogram(const SimulationTrace& trace, double bin_width,
                               std::size_t decimation = 1);

struct TimeSpaceGrid {
  double x0 = 0.0, t0 = 0.0;
  double dx = 0.0, dt = 0.0;
  Eigen::MatrixXd speed;  // rows: position cells, cols: time cells; NaN when empty
};

TimeSpaceGrid time_space_grid(const SimulationTrace& trace, double cell_m, double cell_s);

// Rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// CSV writers
void write_vehicle_stats_csv(std::ostream& os, const std::vector<VehicleStats>& stats);
void write_metrics_report_csv(std::ostream& os, const MetricsReport& report);
void write_binned_stats_csv(std::ostream& os, const BinnedAvStats& stats);
void write_histogram_csv(std::ostream& os, const SpeedHistogram& hist);
void write_time_space_csv(std::ostream& os, const TimeSpaceGrid& grid);

}  // namespace wavesim
