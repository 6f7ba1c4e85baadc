#pragma once

#include <random>

namespace wavesim {

// Intelligent Driver Model parameters. Defaults are the string-unstable
// human-driver set used throughout the simulator.
struct IdmParams {
  double v0 = 35.0;     // desired speed [m/s]
  double T = 1.24;      // time headway [s]
  double a = 1.3;       // max acceleration [m/s^2]
  double b = 2.0;       // comfortable deceleration [m/s^2]
  double delta = 4.0;   // free-road exponent
  double s0 = 2.0;      // jam gap [m]
  double noise_sigma = 0.0;  // per-step acceleration noise [m/s^2]

  void validate() const;
};

inline constexpr double kIdmMinAccel = -6.0;

// Desired gap s* = s0 + max(0, vT + v dv / (2 sqrt(ab))).
double idm_desired_gap(const IdmParams& p, double v, double v_lead);

// Noise-free IDM acceleration clipped to [kIdmMinAccel, p.a].
// Throws DomainError when s <= 0.
double idm_accel(const IdmParams& p, double v, double v_lead, double s);

// As above plus zero-mean Gaussian noise with p.noise_sigma (noise is added
// before clipping).
double idm_accel(const IdmParams& p, double v, double v_lead, double s,
                 std::mt19937_64& rng);

// Gap at which a vehicle at speed v behind a leader at the same speed has zero
// acceleration. Throws DomainError unless 0 <= v < v0.
double idm_equilibrium_gap(const IdmParams& p, double v);

}  // namespace wavesim
