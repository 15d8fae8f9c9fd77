#include <cmath>
#include <numbers>

#include "geoframe/converter.hpp"

namespace geoframe {

void PRParams::validate() const {
  if (!(kp >= 0.0)) throw std::invalid_argument("kp must be non-negative");
  if (!(ki >= 0.0)) throw std::invalid_argument("ki must be non-negative");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
  if (!(omega > 0.0)) throw std::invalid_argument("resonance frequency must be positive");
}

PRController::PRController(PRParams params, double sample_period) : params_(params) {
  params_.validate();
  if (!(sample_period > 0.0)) throw std::invalid_argument("sample period must be positive");
  const double w = params_.omega;
  if (!(w * sample_period < std::numbers::pi)) {
    throw std::invalid_argument("resonance frequency above Nyquist");
  }
  // s -> K (z - 1) / (z + 1), K prewarped so that z = exp(j w Ts) maps to s = j w.
  const double k = w / std::tan(0.5 * w * sample_period);
  const double a0 = k * k + 2.0 * params_.rho * w * k + w * w;
  b0_ = 2.0 * params_.ki * k / a0;
  a1_ = (2.0 * w * w - 2.0 * k * k) / a0;
  a2_ = (k * k - 2.0 * params_.rho * w * k + w * w) / a0;
}

double PRController::step(double error) {
  const double resonant = b0_ * error + s1_;
  s1_ = s2_ - a1_ * resonant;
  s2_ = -b0_ * error - a2_ * resonant;
  return params_.kp * error + resonant;
}

void PRController::reset() {
  s1_ = 0.0;
  s2_ = 0.0;
}

}  // namespace geoframe
