#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoframe/multivector.hpp"

namespace geoframe {

struct Phasor {
  double amplitude;  // V_k >= 0
  double phase;      // phi_k, radians
};

/// Per-phase amplitudes and phases sharing one angular frequency:
/// v_k(t) = V_k cos(omega t + phi_k).
class PhasorSpec {
 public:
  PhasorSpec(double omega, std::vector<Phasor> phases);
  static PhasorSpec from_frequency(double hertz, std::vector<Phasor> phases);

  double omega() const noexcept { return omega_; }
  double frequency() const noexcept;
  double period() const noexcept;
  std::size_t phase_count() const noexcept { return phases_.size(); }
  std::span<const Phasor> phases() const noexcept { return phases_; }

 private:
  double omega_;
  std::vector<Phasor> phases_;
};

/// In-phase and quadrature vectors with v(t) = cos(wt) p - sin(wt) s.
struct PSDecomposition {
  Multivector p;
  Multivector s;
};

PSDecomposition phasor_to_ps(const PhasorSpec& spec);

/// Component k is V_k cos(omega t + phi_k).
std::vector<double> synthesize(const PhasorSpec& spec, double t);

/// Time-stamped n-phase samples with strictly increasing timestamps.
class SampleSeries {
 public:
  explicit SampleSeries(std::size_t phase_count);

  std::size_t phase_count() const noexcept { return phase_count_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  double time(std::size_t i) const { return times_.at(i); }
  std::span<const double> row(std::size_t i) const;
  std::span<const double> times() const noexcept { return times_; }

  /// Throws std::invalid_argument on arity mismatch or non-increasing time.
  void append(double t, std::span<const double> row);

  friend bool operator==(const SampleSeries&, const SampleSeries&) = default;

 private:
  std::size_t phase_count_;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Uniform grid t_i = i / fs for i < floor(duration * fs); duration 0 gives an
/// empty series.
SampleSeries sample_series(const PhasorSpec& spec, double fs, double duration);

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CsvIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header `t,v1,...,vn`, LF line endings, values at 17 significant digits.
SampleSeries read_csv(std::istream& in);
SampleSeries read_csv(const std::filesystem::path& path);
void write_csv(const SampleSeries& series, std::ostream& out);
void write_csv(const SampleSeries& series, const std::filesystem::path& path);

/// Shortest text that round-trips the double exactly (at most 17 digits).
std::string format_double(double value);
/// Parses a full decimal/scientific token; throws std::invalid_argument.
double parse_double(std::string_view token);

}  // namespace geoframe
