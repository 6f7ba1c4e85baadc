#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wavesim {

// Gear-resolved road-load vehicle used as the fitting target for the smooth
// fuel model. Fuel power is wheel power through the transmission plus
// speed-dependent engine friction, divided by the indicated efficiency.
struct PhysicsBaseline {
  double mass = 1750.0;           // [kg]
  double rolling_coeff = 0.009;
  double drag_area = 0.85;        // Cd * A [m^2]
  double air_density = 1.2;       // [kg/m^3]
  double gravity = 9.81;          // [m/s^2]
  double transmission_eff = 0.92;
  double indicated_eff = 0.36;
  double wheel_radius = 0.36;     // [m]
  double final_drive = 3.5;
  std::array<double, 6> gear_ratios = {4.0, 2.4, 1.6, 1.2, 0.95, 0.78};
  double min_gear_rpm = 1200.0;  // highest gear keeping the engine above this
  double idle_rpm = 750.0;
  double friction_torque = 16.0;  // [N m], plus linear term below
  double friction_torque_per_krpm = 8.0;
  double idle_fuel_rate = 0.3;    // [g/s]
  double fuel_lhv = 43000.0;      // [J/g]
};

// Gear-resolved baseline rate in g/s; shows jumps at gear changes.
double physics_fuel_rate_gps(const PhysicsBaseline& p, double v, double a,
                             double grade);

// Named polynomial terms of the smooth model, in gal/s. a_pos = max(a, 0).
enum class EnergyTerm : int {
  kConst = 0,   // 1
  kV,           // v
  kV2,          // v^2
  kV3,          // v^3
  kAV,          // a v
  kAV2,         // a v^2
  kAPos2V,      // a_pos^2 v
  kAPos2,       // a_pos^2
  kGradeV,      // grade v
  kCount
};

inline constexpr int kEnergyTermCount = static_cast<int>(EnergyTerm::kCount);

const char* energy_term_name(EnergyTerm term);

// f(v, a, grade) = max(idle_rate, sum_k coeff_k * term_k), except that
// accelerations at or below fuel_cut_accel return idle_rate.
struct EnergyModel {
  std::string vehicle_class = "midsize_suv";
  std::array<double, kEnergyTermCount> coeffs{};
  double idle_rate = 0.0;          // [gal/s]
  double fuel_cut_accel = -1.0;    // [m/s^2]

  double polynomial(double v, double a, double grade) const;
  void validate() const;
};

inline constexpr double kFuelMinSpeed = 0.0;
inline constexpr double kFuelMaxSpeed = 45.0;
inline constexpr double kFuelMinAccel = -6.0;
inline constexpr double kFuelMaxAccel = 4.0;

// The shipped mid-size SUV model.
const EnergyModel& default_energy_model();

// Least-squares fit of the smooth model to the physics baseline over its
// traction region (positive wheel power), with the constant pinned to the
// idle rate and the curvature terms constrained to be non-negative.
EnergyModel fit_energy_model(const PhysicsBaseline& baseline);

// [gal/s]; throws DomainError outside v in [0, 45], a in [-6, 4].
double fuel_rate(const EnergyModel& m, double v, double a, double grade = 0.0);

// [g/s].
double fuel_rate_gps(const EnergyModel& m, double v, double a, double grade = 0.0);

// Miles per gallon. Zero distance gives 0; zero fuel with positive distance
// gives +inf and logs a warning.
double mpg(double distance_m, double fuel_gal);
double mpg_from_grams(double distance_m, double fuel_g);

struct ConvexityGrid {
  double v_min = 1.0;
  double v_max = 35.0;
  double a_min = -3.0;
  double a_max = 1.5;
  double v_step = 0.25;
  double a_step = 0.05;
  double grade = 0.0;
  double tolerance = 1e-9;  // on second-derivative estimates
};

struct ConvexityViolation {
  char direction;  // 'a': d2f/da2, 'v': d2(f/v)/dv2
  double v;
  double a;
  double second_derivative;
};

struct ConvexityReport {
  std::vector<ConvexityViolation> violations;
  std::size_t points_checked = 0;
  std::size_t points_skipped = 0;  // stencils straddling the fuel-cut boundary
  bool ok() const { return violations.empty(); }
};

ConvexityReport check_convexity(const EnergyModel& m, const ConvexityGrid& grid = {});

// Plain-text model file: "key value" lines, '#' comments.
void write_energy_model(std::ostream& os, const EnergyModel& m);
EnergyModel read_energy_model(std::istream& is);

// Fuel per distance of a speed profile sampled at dt: returns (distance m,
// fuel gal) using forward differences for acceleration.
struct ProfileEnergy {
  double distance_m = 0.0;
  double fuel_gal = 0.0;
  double mpg() const;
};
ProfileEnergy integrate_profile(const EnergyModel& m, std::span<const double> speeds,
                                double dt);

}  // namespace wavesim
