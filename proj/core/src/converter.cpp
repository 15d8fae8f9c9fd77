#include "geoframe/converter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace geoframe {

Multivector GeometricPower::as_multivector() const {
  return Multivector(2, {{0, scalar}, {blade_of({1, 2}), bivector}});
}

GeometricPower geometric_power(PlaneVector v, PlaneVector i) {
  return {v.p * i.p + v.s * i.s, v.p * i.s - v.s * i.p};
}

PlaneVector reference_currents(const GeometricPower& target, PlaneVector v) {
  const double mag2 = v.p * v.p + v.s * v.s;
  if (!(std::sqrt(mag2) > kZeroTolerance)) throw DegenerateMagnitude(std::sqrt(mag2));
  // v M = (p0 vp - N vs) s1 + (p0 vs + N vp) s2
  return {(target.scalar * v.p - target.bivector * v.s) / mag2,
          (target.scalar * v.s + target.bivector * v.p) / mag2};
}

const char* to_string(ControlFrame frame) noexcept {
  return frame == ControlFrame::PS ? "PS" : "Clarke";
}

SimConfig SimConfig::defaults() {
  SimConfig cfg;
  const double v = 325.0;
  const double third = 2.0 * std::numbers::pi / 3.0;
  cfg.grid_before = {{v, 0.0}, {v, -third}, {v, third}};
  cfg.grid_after = {{v, 0.0}, {0.8 * v, -2.2}, {0.9 * v, 2.0}};
  cfg.power_schedule = {{0.0, 3000.0, 0.0}, {0.12, 9000.0, 0.0}};
  cfg.pr = PRParams{20.0, 1000.0, 0.01, 2.0 * std::numbers::pi * cfg.grid_frequency};
  return cfg;
}

void SimConfig::validate() const {
  if (!(sample_period > 0.0)) throw std::invalid_argument("Ts must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(filter_inductance > 0.0)) throw std::invalid_argument("Lf must be positive");
  if (!(filter_resistance >= 0.0)) throw std::invalid_argument("Rf must be non-negative");
  if (!(grid_frequency > 0.0)) throw std::invalid_argument("grid frequency must be positive");
  if (grid_before.size() != 3 || grid_after.size() != 3) {
    throw std::invalid_argument("grid phasors must list three phases");
  }
  if (!(grid_resistance >= 0.0) || !(grid_inductance >= 0.0)) {
    throw std::invalid_argument("grid impedance must be non-negative");
  }
  for (double s : impedance_scale) {
    if (!(s >= 0.0)) throw std::invalid_argument("impedance scale must be non-negative");
  }
  if (!(unbalance_time >= 0.0 && unbalance_time <= horizon)) {
    throw std::invalid_argument("unbalance time outside the horizon");
  }
  if (power_schedule.empty()) throw std::invalid_argument("power schedule is empty");
  for (std::size_t k = 0; k < power_schedule.size(); ++k) {
    const double t = power_schedule[k].time;
    if (!(t >= 0.0 && t <= horizon)) throw std::invalid_argument("power step outside the horizon");
    if (k > 0 && !(t > power_schedule[k - 1].time)) {
      throw std::invalid_argument("power schedule times must increase");
    }
  }
  pr.validate();
  estimator.validate();
  // Validates the phasor lists.
  PhasorSpec::from_frequency(grid_frequency, grid_before);
  PhasorSpec::from_frequency(grid_frequency, grid_after);
}

PowerStep SimConfig::reference_at(double t) const {
  PowerStep current{t, 0.0, 0.0};
  for (const PowerStep& step : power_schedule) {
    if (step.time <= t) current = step;
  }
  return current;
}

std::vector<double> SimConfig::grid_voltage(double t) const {
  const auto& phasors = t < unbalance_time ? grid_before : grid_after;
  return synthesize(PhasorSpec::from_frequency(grid_frequency, phasors), t);
}

namespace {

struct PhasePlant {
  double inductance;   // filter plus grid
  double resistance;
  double grid_resistance;
  double grid_inductance;
};

// Exact zero-order-hold update of L di/dt = u - R i.
double zoh_step(const PhasePlant& ph, double current, double drive, double ts) {
  if (ph.resistance == 0.0) return current + ts * drive / ph.inductance;
  const double decay = std::exp(-ph.resistance * ts / ph.inductance);
  return decay * current + (1.0 - decay) * drive / ph.resistance;
}

std::array<double, 4> rotor_coefficients(const Rotor& r) {
  return {r.coefficient(0), r.coefficient(blade_of({1, 2})), r.coefficient(blade_of({1, 3})),
          r.coefficient(blade_of({2, 3}))};
}

}  // namespace

SimTrace run_scenario(const SimConfig& cfg) {
  cfg.validate();
  const double ts = cfg.sample_period;

  std::array<PhasePlant, 3> plant{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double rg = cfg.grid_resistance * cfg.impedance_scale[k];
    const double lg = cfg.grid_inductance * cfg.impedance_scale[k];
    plant[k] = {cfg.filter_inductance + lg, cfg.filter_resistance + rg, rg, lg};
  }

  FrameEstimator estimator(3, cfg.estimator);
  PRController pr_p(cfg.pr, ts);
  PRController pr_s(cfg.pr, ts);

  std::array<double, 3> current = cfg.initial_current;
  std::array<double, 3> held_drive{};  // converter voltage applied over the previous step
  {
    const auto e0 = cfg.grid_voltage(0.0);
    for (std::size_t k = 0; k < 3; ++k) held_drive[k] = e0[k] + plant[k].resistance * current[k];
  }

  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / ts));
  SimTrace trace;
  trace.frame = cfg.frame;
  trace.records.reserve(steps);

  for (std::size_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * ts;
    const auto e = cfg.grid_voltage(t);

    SimRecord rec;
    rec.t = t;
    for (std::size_t k = 0; k < 3; ++k) {
      const double didt =
          (held_drive[k] - e[k] - plant[k].resistance * current[k]) / plant[k].inductance;
      rec.v_abc[k] = e[k] + plant[k].grid_resistance * current[k] + plant[k].grid_inductance * didt;
      rec.i_abc[k] = current[k];
    }

    const auto estimate = estimator.push_sample(rec.v_abc, t);
    std::optional<FrameTransform> frame;
    if (estimate) {
      frame = estimate->frame;
      rec.transition = estimate->transition;
    } else {
      frame = estimator.current_frame();
    }
    if (frame) rec.rotor = rotor_coefficients(frame->rotor);

    bool control_active = false;
    if (cfg.frame == ControlFrame::PS) {
      if (frame) {
        const TransformedSample vf = transform_sample(*frame, rec.v_abc);
        const TransformedSample cf = transform_sample(*frame, rec.i_abc);
        rec.v_frame = {vf.p, vf.s, vf.residual[0]};
        rec.i_frame = {cf.p, cf.s, cf.residual[0]};
        rec.frame_valid = true;
        control_active = true;
      }
    } else {
      const ClarkeComponents vc = clarke_transform(rec.v_abc);
      const ClarkeComponents cc = clarke_transform(rec.i_abc);
      rec.v_frame = {vc.alpha, vc.beta, vc.zero};
      rec.i_frame = {cc.alpha, cc.beta, cc.zero};
      rec.frame_valid = true;
      control_active = true;
    }
    rec.v0_clarke = clarke_transform(rec.v_abc).zero;

    const PowerStep ref = cfg.reference_at(t);
    rec.p0_ref = ref.p0;
    const PlaneVector v_plane{rec.v_frame[0], rec.v_frame[1]};
    const PlaneVector i_plane{rec.i_frame[0], rec.i_frame[1]};
    rec.p0 = geometric_power(v_plane, i_plane).scalar;

    std::array<double, 3> correction{};
    if (control_active && !cfg.open_loop) {
      try {
        rec.i_ref = reference_currents({ref.p0, ref.n}, v_plane);
      } catch (const DegenerateMagnitude&) {
        rec.i_ref = {};
      }
      const double up = pr_p.step(rec.i_ref.p - i_plane.p);
      const double us = pr_s.step(rec.i_ref.s - i_plane.s);
      std::vector<double> u_abc = cfg.frame == ControlFrame::PS
                                      ? inverse_transform(*frame, {up, us, {0.0}})
                                      : inverse_clarke({up, us, 0.0});
      std::copy(u_abc.begin(), u_abc.end(), correction.begin());
    }

    for (std::size_t k = 0; k < 3; ++k) {
      held_drive[k] = rec.v_abc[k] + correction[k];
      current[k] = zoh_step(plant[k], current[k], held_drive[k] - e[k], ts);
    }
    trace.records.push_back(rec);
  }
  return trace;
}

std::vector<std::string> trace_columns() {
  return {"t",   "v1",    "v2",      "v3",      "i1",  "i2",  "i3",     "v_p",
          "v_s", "v_res", "i_p",     "i_s",     "i_res", "i_p_ref", "i_s_ref", "v0",
          "p0",  "p0_ref", "r_0",    "r_12",    "r_13", "r_23", "valid",  "transition"};
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  const auto cols = trace_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const SimRecord& r : trace.records) {
    out << format_double(r.t);
    auto put = [&out](double x) { out << ',' << format_double(x); };
    for (double x : r.v_abc) put(x);
    for (double x : r.i_abc) put(x);
    for (double x : r.v_frame) put(x);
    for (double x : r.i_frame) put(x);
    put(r.i_ref.p);
    put(r.i_ref.s);
    put(r.v0_clarke);
    put(r.p0);
    put(r.p0_ref);
    for (double x : r.rotor) put(x);
    out << ',' << (r.frame_valid ? 1 : 0) << ',' << (r.transition ? 1 : 0) << '\n';
  }
}

double rms(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum / static_cast<double>(values.size()));
}

ScenarioSummary summarize(const SimTrace& trace, const SimConfig& cfg) {
  ScenarioSummary out;
  const double cycle = 1.0 / cfg.grid_frequency;

  std::vector<double> events;
  for (const PowerStep& s : cfg.power_schedule) events.push_back(s.time);
  events.push_back(cfg.horizon);

  out.window_start = cfg.unbalance_time + 0.5 * cycle;
  out.window_end = cfg.horizon;
  for (double ev : events) {
    if (ev > out.window_start) {
      out.window_end = ev;
      break;
    }
  }

  std::vector<double> residual;
  std::vector<double> window_residual;
  std::vector<double> v0;
  std::vector<double> ab;
  for (const SimRecord& r : trace.records) {
    if (r.frame_valid) {
      residual.push_back(r.v_frame[2]);
      out.residual_max = std::max(out.residual_max, std::abs(r.v_frame[2]));
    }
    if (r.t >= out.window_start && r.t < out.window_end) {
      if (r.frame_valid) window_residual.push_back(r.v_frame[2]);
      const ClarkeComponents c = clarke_transform(r.v_abc);
      v0.push_back(c.zero);
      ab.push_back(std::hypot(c.alpha, c.beta));
    }
  }
  out.residual_rms = rms(window_residual);
  out.v0_rms = rms(v0);
  out.alpha_beta_rms = rms(ab);

  for (std::size_t k = 0; k < cfg.power_schedule.size(); ++k) {
    SegmentPower seg;
    seg.start = cfg.power_schedule[k].time;
    seg.end = events[k + 1];
    seg.p0_ref = cfg.power_schedule[k].p0;
    double sum = 0.0;
    std::size_t count = 0;
    for (const SimRecord& r : trace.records) {
      if (r.t >= seg.end - cycle && r.t < seg.end) {
        sum += r.p0;
        ++count;
      }
    }
    seg.p0_cycle_mean = count ? sum / static_cast<double>(count) : 0.0;
    const double scale = seg.p0_ref != 0.0 ? std::abs(seg.p0_ref) : 1.0;
    seg.relative_error = std::abs(seg.p0_cycle_mean - seg.p0_ref) / scale;
    for (const SimRecord& r : trace.records) {
      if (r.t >= seg.end - cycle && r.t < seg.end) {
        seg.max_relative_error = std::max(seg.max_relative_error, std::abs(r.p0 - seg.p0_ref) / scale);
      }
    }
    out.segments.push_back(seg);
  }

  auto cycle_mean = [&](double from) {
    std::array<double, 4> mean{};
    std::size_t count = 0;
    for (const SimRecord& r : trace.records) {
      if (r.frame_valid && r.t >= from && r.t < from + cycle) {
        for (std::size_t c = 0; c < 4; ++c) mean[c] += r.rotor[c];
        ++count;
      }
    }
    for (double& m : mean) m = count ? m / static_cast<double>(count) : 0.0;
    return mean;
  };
  auto distance = [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double worst = 0.0;
    for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(a[c] - b[c]));
    return worst;
  };
  std::vector<double> step_times{cfg.unbalance_time};
  for (const PowerStep& s : cfg.power_schedule) {
    if (s.time > cfg.unbalance_time) step_times.push_back(s.time);
  }
  for (double ev : step_times) {
    if (ev - cycle < 0.0 || ev + 2.0 * cycle > cfg.horizon + 0.5 * cfg.sample_period) continue;
    const auto before = cycle_mean(ev - cycle);
    const double baseline = ev - 2.0 * cycle >= 0.0 ? distance(cycle_mean(ev - 2.0 * cycle), before)
                                                    : std::numeric_limits<double>::quiet_NaN();
    out.rotor_steps.push_back({ev, distance(before, cycle_mean(ev + cycle)), baseline});
  }
  return out;
}

}  // namespace geoframe
