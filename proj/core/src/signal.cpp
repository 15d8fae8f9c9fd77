#include "geoframe/signal.hpp"

#include <cmath>
#include <numbers>

namespace geoframe {

PhasorSpec::PhasorSpec(double omega, std::vector<Phasor> phases)
    : omega_(omega), phases_(std::move(phases)) {
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) {
    throw std::invalid_argument("angular frequency must be positive");
  }
  if (phases_.size() < 2 || phases_.size() > static_cast<std::size_t>(kMaxDimension)) {
    throw std::invalid_argument("phase count must be in [2, 16]");
  }
  for (const Phasor& ph : phases_) {
    if (!(ph.amplitude >= 0.0) || !std::isfinite(ph.amplitude) || !std::isfinite(ph.phase)) {
      throw std::invalid_argument("phase amplitudes must be finite and non-negative");
    }
  }
}

PhasorSpec PhasorSpec::from_frequency(double hertz, std::vector<Phasor> phases) {
  return PhasorSpec(2.0 * std::numbers::pi * hertz, std::move(phases));
}

double PhasorSpec::frequency() const noexcept { return omega_ / (2.0 * std::numbers::pi); }

double PhasorSpec::period() const noexcept { return 2.0 * std::numbers::pi / omega_; }

PSDecomposition phasor_to_ps(const PhasorSpec& spec) {
  std::vector<double> p;
  std::vector<double> s;
  for (const Phasor& ph : spec.phases()) {
    p.push_back(ph.amplitude * std::cos(ph.phase));
    s.push_back(ph.amplitude * std::sin(ph.phase));
  }
  return {Multivector::vector(p), Multivector::vector(s)};
}

std::vector<double> synthesize(const PhasorSpec& spec, double t) {
  std::vector<double> v;
  v.reserve(spec.phase_count());
  const double wt = spec.omega() * t;
  for (const Phasor& ph : spec.phases()) v.push_back(ph.amplitude * std::cos(wt + ph.phase));
  return v;
}

SampleSeries::SampleSeries(std::size_t phase_count) : phase_count_(phase_count) {
  if (phase_count_ < 1) throw std::invalid_argument("sample series needs at least one phase");
}

std::span<const double> SampleSeries::row(std::size_t i) const {
  if (i >= times_.size()) throw std::out_of_range("sample row index out of range");
  return std::span<const double>(values_).subspan(i * phase_count_, phase_count_);
}

void SampleSeries::append(double t, std::span<const double> row) {
  if (row.size() != phase_count_) {
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(phase_count_));
  }
  if (!std::isfinite(t)) throw std::invalid_argument("timestamp must be finite");
  if (!times_.empty() && !(t > times_.back())) {
    throw std::invalid_argument("timestamps must be strictly increasing");
  }
  times_.push_back(t);
  values_.insert(values_.end(), row.begin(), row.end());
}

SampleSeries sample_series(const PhasorSpec& spec, double fs, double duration) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw std::invalid_argument("sampling rate must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("duration must be non-negative");
  }
  // Relative slack absorbs products like 0.02 * 10000 landing just below 200.
  const auto count = static_cast<std::size_t>(std::floor(duration * fs * (1.0 + 1e-12)));
  SampleSeries series(spec.phase_count());
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / fs;
    series.append(t, synthesize(spec, t));
  }
  return series;
}

}  // namespace geoframe
