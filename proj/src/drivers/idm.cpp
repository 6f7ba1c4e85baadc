#include "wavesim/idm.hpp"

#include <algorithm>
#include <cmath>

#include "wavesim/errors.hpp"

namespace wavesim {

void IdmParams::validate() const {
  if (!(v0 > 0 && T > 0 && a > 0 && b > 0 && delta > 0 && s0 > 0)) {
    throw DomainError("IDM parameters must be positive");
  }
  if (!(noise_sigma >= 0)) throw DomainError("IDM noise sigma must be >= 0");
}

double idm_desired_gap(const IdmParams& p, double v, double v_lead) {
  const double dv = v - v_lead;
  return p.s0 + std::max(0.0, v * p.T + v * dv / (2.0 * std::sqrt(p.a * p.b)));
}

namespace {

double idm_raw(const IdmParams& p, double v, double v_lead, double s) {
  if (!(s > 0)) throw DomainError("IDM requires a positive gap");
  const double s_star = idm_desired_gap(p, v, v_lead);
  const double ratio = s_star / s;
  return p.a * (1.0 - std::pow(v / p.v0, p.delta) - ratio * ratio);
}

}  // namespace

double idm_accel(const IdmParams& p, double v, double v_lead, double s) {
  return std::clamp(idm_raw(p, v, v_lead, s), kIdmMinAccel, p.a);
}

double idm_accel(const IdmParams& p, double v, double v_lead, double s,
                 std::mt19937_64& rng) {
  double acc = idm_raw(p, v, v_lead, s);
  if (p.noise_sigma > 0) {
    std::normal_distribution<double> noise(0.0, p.noise_sigma);
    acc += noise(rng);
  }
  return std::clamp(acc, kIdmMinAccel, p.a);
}

double idm_equilibrium_gap(const IdmParams& p, double v) {
  if (!(v >= 0 && v < p.v0)) {
    throw DomainError("equilibrium gap needs 0 <= v < v0");
  }
  return (p.s0 + v * p.T) / std::sqrt(1.0 - std::pow(v / p.v0, p.delta));
}

}  // namespace wavesim
