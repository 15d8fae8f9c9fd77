#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoframe/estimator.hpp"
#include "geoframe/signal.hpp"

namespace geoframe {

// ---------------------------------------------------------------------------
// Proportional-resonant regulator
// ---------------------------------------------------------------------------

/// H(s) = kp + 2 ki s / (s^2 + 2 rho omega s + omega^2)
struct PRParams {
  double kp = 0.0;
  double ki = 0.0;
  double rho = 0.01;
  double omega = 0.0;

  void validate() const;
};

/// Tustin discretization of H(s) prewarped at omega, so the discrete gain at
/// the resonance equals kp + ki / (rho omega) exactly.
class PRController {
 public:
  PRController(PRParams params, double sample_period);

  double step(double error);
  void reset();

  const PRParams& params() const noexcept { return params_; }

 private:
  PRParams params_;
  double b0_ = 0.0;  // resonant numerator: b0 (1 - z^-2)
  double a1_ = 0.0;
  double a2_ = 0.0;
  double s1_ = 0.0;  // direct form II transposed states
  double s2_ = 0.0;
};

// ---------------------------------------------------------------------------
// Geometric power in the ps plane
// ---------------------------------------------------------------------------

struct PlaneVector {
  double p = 0.0;
  double s = 0.0;
};

/// M = p0 + N sigma_12.
struct GeometricPower {
  double scalar = 0.0;    // p0 = v . i
  double bivector = 0.0;  // N = v ^ i, sigma_12 coefficient

  Multivector as_multivector() const;
};

GeometricPower geometric_power(PlaneVector v, PlaneVector i);

/// i = v^-1 M with v^-1 = v / |v|^2; throws DegenerateMagnitude when
/// |v| <= kZeroTolerance.
PlaneVector reference_currents(const GeometricPower& target, PlaneVector v);

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

enum class ControlFrame { PS, Clarke };

const char* to_string(ControlFrame frame) noexcept;

struct PowerStep {
  double time = 0.0;
  double p0 = 0.0;
  double n = 0.0;
};

/// Averaged three-phase grid-following converter behind an L filter feeding
/// an unbalanced series-impedance grid.
struct SimConfig {
  double sample_period = 100e-6;
  double horizon = 0.2;
  double filter_inductance = 5e-3;
  double filter_resistance = 0.1;
  double grid_frequency = 50.0;
  std::vector<Phasor> grid_before;
  std::vector<Phasor> grid_after;
  double unbalance_time = 0.02;
  double grid_resistance = 0.05;
  double grid_inductance = 1e-3;
  std::array<double, 3> impedance_scale{1.0, 2.0, 4.0};
  std::vector<PowerStep> power_schedule;
  ControlFrame frame = ControlFrame::PS;
  PRParams pr;
  EstimatorConfig estimator;
  bool open_loop = false;
  std::array<double, 3> initial_current{0.0, 0.0, 0.0};

  /// Defaults used by the unbalance-step scenario; controller gains are
  /// tuned for this plant.
  static SimConfig defaults();

  void validate() const;
  PowerStep reference_at(double t) const;
  std::vector<double> grid_voltage(double t) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key=value` lines; `#` starts a comment. Unlisted keys keep their
/// defaults. Throws ConfigError on unknown keys or malformed values.
SimConfig parse_scenario_config(std::istream& in);
SimConfig load_scenario_config(const std::filesystem::path& path);
std::string format_scenario_config(const SimConfig& cfg);

struct SimRecord {
  double t = 0.0;
  std::array<double, 3> v_abc{};
  std::array<double, 3> i_abc{};
  // Controller-frame coordinates: (p, s, residual) in the ps frame or
  // (alpha, beta, zero) in the Clarke frame.
  std::array<double, 3> v_frame{};
  std::array<double, 3> i_frame{};
  PlaneVector i_ref;
  double v0_clarke = 0.0;
  double p0 = 0.0;
  double p0_ref = 0.0;
  std::array<double, 4> rotor{1.0, 0.0, 0.0, 0.0};  // 0, 12, 13, 23
  bool frame_valid = false;
  bool transition = false;
};

struct SimTrace {
  ControlFrame frame = ControlFrame::PS;
  std::vector<SimRecord> records;
};

SimTrace run_scenario(const SimConfig& cfg);

/// Trace CSV: `t,v1,v2,v3,i1,i2,i3,v_p,v_s,v_res,i_p,i_s,i_res,i_p_ref,i_s_ref,
/// v0,p0,p0_ref,r_0,r_12,r_13,r_23,valid,transition`.
void write_trace_csv(const SimTrace& trace, std::ostream& out);
std::vector<std::string> trace_columns();

struct SegmentPower {
  double start = 0.0;
  double end = 0.0;
  double p0_ref = 0.0;
  double p0_cycle_mean = 0.0;  // mean of p0 over the last grid cycle of the segment
  double relative_error = 0.0;
  double max_relative_error = 0.0;  // worst instantaneous |p0 - p0_ref| / |p0_ref|, same cycle
};

/// Change of the cycle-mean rotor coefficients across an event: the cycle
/// before the event against the second cycle after it. `baseline` is the
/// same measure between the two cycles preceding the event (NaN when the
/// event is less than two cycles into the trace).
struct RotorStep {
  double time = 0.0;
  double magnitude = 0.0;
  double baseline = 0.0;
};

struct ScenarioSummary {
  double residual_max = 0.0;  // max |v_res| over valid samples
  double residual_rms = 0.0;
  double v0_rms = 0.0;        // Clarke zero component, unbalanced window
  double alpha_beta_rms = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<SegmentPower> segments;
  std::vector<RotorStep> rotor_steps;  // unbalance step, then every later power step
};

/// `window` defaults to one cycle after the unbalance step up to the next
/// power-reference event (or the horizon).
ScenarioSummary summarize(const SimTrace& trace, const SimConfig& cfg);

double rms(std::span<const double> values);

}  // namespace geoframe
