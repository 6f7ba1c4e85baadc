#include "wavesim/energy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wavesim/errors.hpp"
#include "wavesim/units.hpp"

namespace wavesim {

namespace {

// Frozen output of fit_energy_model(PhysicsBaseline{}); regenerate with
// `wavesim fit-energy` when the baseline changes.
constexpr double kDefaultIdle = 0.00010637800766099936;
constexpr std::array<double, kEnergyTermCount> kDefaultCoeffs = {
    0.00010637800766099936,  // const
    8.7113282364344028e-07,  // v
    8.3558106933529861e-08,  // v2
    1.5574263309324652e-08,  // v3
    4.3398238456540497e-05,  // a_v
    5.0917216999962479e-09,  // a_v2
    1.5047444110897267e-08,  // apos2_v
    0.0,                     // apos2
    0.00042721398704435442,  // grade_v
};

double wheel_power(const PhysicsBaseline& p, double v, double a, double grade) {
  const double hyp = std::sqrt(1.0 + grade * grade);
  const double cos_t = 1.0 / hyp;
  const double sin_t = grade / hyp;
  return p.mass * a * v + p.mass * p.gravity * p.rolling_coeff * cos_t * v +
         0.5 * p.air_density * p.drag_area * v * v * v +
         p.mass * p.gravity * sin_t * v;
}

double engine_rpm(const PhysicsBaseline& p, double v) {
  const double wheel_rpm = v / p.wheel_radius * 60.0 / (2.0 * std::numbers::pi);
  double rpm = wheel_rpm * p.gear_ratios.front() * p.final_drive;
  for (double ratio : p.gear_ratios) {
    const double candidate = wheel_rpm * ratio * p.final_drive;
    if (candidate >= p.min_gear_rpm) rpm = candidate;
  }
  return std::max(rpm, p.idle_rpm);
}

double term_value(EnergyTerm term, double v, double a, double grade) {
  const double a_pos = std::max(a, 0.0);
  switch (term) {
    case EnergyTerm::kConst:
      return 1.0;
    case EnergyTerm::kV:
      return v;
    case EnergyTerm::kV2:
      return v * v;
    case EnergyTerm::kV3:
      return v * v * v;
    case EnergyTerm::kAV:
      return a * v;
    case EnergyTerm::kAV2:
      return a * v * v;
    case EnergyTerm::kAPos2V:
      return a_pos * a_pos * v;
    case EnergyTerm::kAPos2:
      return a_pos * a_pos;
    case EnergyTerm::kGradeV:
      return grade * v;
    case EnergyTerm::kCount:
      break;
  }
  return 0.0;
}

bool must_be_nonnegative(EnergyTerm term) {
  return term == EnergyTerm::kV3 || term == EnergyTerm::kAPos2V ||
         term == EnergyTerm::kAPos2;
}

}  // namespace

double physics_fuel_rate_gps(const PhysicsBaseline& p, double v, double a,
                             double grade) {
  const double power = wheel_power(p, v, a, grade);
  if (power <= 0) return p.idle_fuel_rate;
  const double rpm = engine_rpm(p, v);
  const double omega = rpm * 2.0 * std::numbers::pi / 60.0;
  const double friction =
      (p.friction_torque + p.friction_torque_per_krpm * rpm / 1000.0) * omega;
  const double fuel_power = (power / p.transmission_eff + friction) / p.indicated_eff;
  return std::max(p.idle_fuel_rate, fuel_power / p.fuel_lhv);
}

const char* energy_term_name(EnergyTerm term) {
  static constexpr std::array<const char*, kEnergyTermCount> kNames = {
      "const", "v", "v2", "v3", "a_v", "a_v2", "apos2_v", "apos2", "grade_v"};
  return kNames.at(static_cast<std::size_t>(term));
}

double EnergyModel::polynomial(double v, double a, double grade) const {
  double sum = 0.0;
  for (int k = 0; k < kEnergyTermCount; ++k) {
    sum += coeffs[k] * term_value(static_cast<EnergyTerm>(k), v, a, grade);
  }
  return sum;
}

void EnergyModel::validate() const {
  if (!(idle_rate > 0)) throw DomainError("energy model idle rate must be > 0");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw DomainError("energy model coefficient not finite");
  }
}

EnergyModel fit_energy_model(const PhysicsBaseline& baseline) {
  struct Sample {
    double v, a, grade, rate;
  };
  std::vector<Sample> samples;
  for (int iv = 1; iv <= 140; ++iv) {
    const double v = 0.25 * iv;
    for (int ia = 0; ia <= 100; ++ia) {
      const double a = -3.0 + 0.05 * ia;
      for (double grade : {-0.02, 0.0, 0.02}) {
        if (wheel_power(baseline, v, a, grade) <= 0) continue;
        samples.push_back({v, a, grade,
                           physics_fuel_rate_gps(baseline, v, a, grade) /
                               units::kGramsPerGallon});
      }
    }
  }

  EnergyModel model;
  model.idle_rate = baseline.idle_fuel_rate / units::kGramsPerGallon;
  model.coeffs[static_cast<int>(EnergyTerm::kConst)] = model.idle_rate;

  std::vector<int> active;
  for (int k = 1; k < kEnergyTermCount; ++k) active.push_back(k);

  // Active-set refit: drop any sign-constrained term that comes out negative.
  while (true) {
    Eigen::MatrixXd design(samples.size(), active.size());
    Eigen::VectorXd target(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      for (std::size_t j = 0; j < active.size(); ++j) {
        design(i, j) = term_value(static_cast<EnergyTerm>(active[j]), s.v, s.a, s.grade);
      }
      target(i) = s.rate - model.idle_rate;
    }
    // Column scaling keeps the normal equations well conditioned.
    Eigen::VectorXd scale = design.colwise().norm().transpose();
    for (std::size_t j = 0; j < active.size(); ++j) design.col(j) /= scale(j);
    Eigen::VectorXd sol = design.colPivHouseholderQr().solve(target);
    sol = sol.cwiseQuotient(scale);

    int drop = -1;
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (must_be_nonnegative(static_cast<EnergyTerm>(active[j])) && sol(j) < 0) {
        drop = static_cast<int>(j);
        break;
      }
    }
    if (drop < 0) {
      for (std::size_t j = 0; j < active.size(); ++j) model.coeffs[active[j]] = sol(j);
      break;
    }
    active.erase(active.begin() + drop);
  }
  return model;
}

const EnergyModel& default_energy_model() {
  static const EnergyModel kModel = [] {
    EnergyModel m;
    m.vehicle_class = "midsize_suv";
    m.idle_rate = kDefaultIdle;
    m.coeffs = kDefaultCoeffs;
    m.fuel_cut_accel = -1.0;
    return m;
  }();
  return kModel;
}

double fuel_rate(const EnergyModel& m, double v, double a, double grade) {
  if (!(v >= kFuelMinSpeed && v <= kFuelMaxSpeed)) {
    throw DomainError("fuel_rate speed outside [0, 45] m/s");
  }
  if (!(a >= kFuelMinAccel && a <= kFuelMaxAccel)) {
    throw DomainError("fuel_rate acceleration outside [-6, 4] m/s^2");
  }
  if (a <= m.fuel_cut_accel) return m.idle_rate;
  return std::max(m.idle_rate, m.polynomial(v, a, grade));
}

double fuel_rate_gps(const EnergyModel& m, double v, double a, double grade) {
  return fuel_rate(m, v, a, grade) * units::kGramsPerGallon;
}

double mpg(double distance_m, double fuel_gal) {
  if (distance_m == 0.0) return 0.0;
  if (fuel_gal == 0.0) {
    std::cerr << "warning: mpg with zero fuel; returning +inf\n";
    return std::numeric_limits<double>::infinity();
  }
  return (distance_m / units::kMetersPerMile) / fuel_gal;
}

double mpg_from_grams(double distance_m, double fuel_g) {
  return mpg(distance_m, fuel_g / units::kGramsPerGallon);
}

ConvexityReport check_convexity(const EnergyModel& m, const ConvexityGrid& grid) {
  ConvexityReport report;
  const int nv = static_cast<int>(std::round((grid.v_max - grid.v_min) / grid.v_step));
  const int na = static_cast<int>(std::round((grid.a_max - grid.a_min) / grid.a_step));
  const double hv = grid.v_step;
  const double ha = grid.a_step;
  auto f = [&](double v, double a) { return fuel_rate(m, v, a, grid.grade); };
  auto cut = [&](double a) { return a <= m.fuel_cut_accel; };

  for (int i = 0; i <= nv; ++i) {
    const double v = grid.v_min + i * hv;
    for (int j = 0; j <= na; ++j) {
      const double a = grid.a_min + j * ha;
      // a-direction: interior of the a range only.
      if (j > 0 && j < na) {
        if (cut(a - ha) != cut(a) || cut(a + ha) != cut(a)) {
          ++report.points_skipped;
        } else {
          const double d2 = (f(v, a + ha) - 2.0 * f(v, a) + f(v, a - ha)) / (ha * ha);
          ++report.points_checked;
          if (d2 < -grid.tolerance) report.violations.push_back({'a', v, a, d2});
        }
      }
      if (i > 0 && i < nv) {
        auto g = [&](double vv) { return f(vv, a) / vv; };
        const double d2 = (g(v + hv) - 2.0 * g(v) + g(v - hv)) / (hv * hv);
        ++report.points_checked;
        if (d2 < -grid.tolerance) report.violations.push_back({'v', v, a, d2});
      }
    }
  }
  return report;
}

void write_energy_model(std::ostream& os, const EnergyModel& m) {
  os << "# wavesim energy model v1 (rates in gal/s)\n";
  os << std::setprecision(17);
  os << "vehicle_class " << m.vehicle_class << '\n';
  os << "idle_rate " << m.idle_rate << '\n';
  os << "fuel_cut_accel " << m.fuel_cut_accel << '\n';
  for (int k = 0; k < kEnergyTermCount; ++k) {
    os << "coeff." << energy_term_name(static_cast<EnergyTerm>(k)) << ' '
       << m.coeffs[k] << '\n';
  }
}

EnergyModel read_energy_model(std::istream& is) {
  EnergyModel m;
  std::map<std::string, int> term_index;
  for (int k = 0; k < kEnergyTermCount; ++k) {
    term_index[std::string("coeff.") + energy_term_name(static_cast<EnergyTerm>(k))] = k;
  }
  bool have_idle = false;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "vehicle_class") {
      ls >> m.vehicle_class;
      continue;
    }
    double value = 0.0;
    if (!(ls >> value)) {
      throw ConfigError("energy model line " + std::to_string(line_no) + ": bad value");
    }
    if (key == "idle_rate") {
      m.idle_rate = value;
      have_idle = true;
    } else if (key == "fuel_cut_accel") {
      m.fuel_cut_accel = value;
    } else if (auto it = term_index.find(key); it != term_index.end()) {
      m.coeffs[it->second] = value;
    } else {
      throw ConfigError("energy model line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  if (!have_idle) throw ConfigError("energy model file lacks idle_rate");
  m.validate();
  return m;
}

double ProfileEnergy::mpg() const { return wavesim::mpg(distance_m, fuel_gal); }

ProfileEnergy integrate_profile(const EnergyModel& m, std::span<const double> speeds,
                                double dt) {
  ProfileEnergy out;
  for (std::size_t k = 0; k + 1 < speeds.size(); ++k) {
    const double a = (speeds[k + 1] - speeds[k]) / dt;
    out.fuel_gal += fuel_rate(m, speeds[k], a) * dt;
    out.distance_m += speeds[k + 1] * dt;
  }
  return out;
}

}  // namespace wavesim
