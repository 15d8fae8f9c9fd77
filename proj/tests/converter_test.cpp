#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "test_support.hpp"

namespace geoframe {
namespace {

using std::numbers::pi;

// --- PR regulator ---------------------------------------------------------

// Continuous H(s) = kp + 2 ki s / (s^2 + 2 rho w s + w^2) as the state
// space x1' = x2, x2' = -w^2 x1 - 2 rho w x2 + u, y = kp u + 2 ki x2,
// integrated with classical RK4.
class ContinuousPR {
 public:
  explicit ContinuousPR(PRParams p) : p_(p) {}

  void advance(const std::function<double(double)>& u, double t0, double h) {
    auto f = [&](double t, double a, double b, double& da, double& db) {
      da = b;
      db = -p_.omega * p_.omega * a - 2.0 * p_.rho * p_.omega * b + u(t);
    };
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    f(t0, x1_, x2_, k1a, k1b);
    f(t0 + h / 2, x1_ + h / 2 * k1a, x2_ + h / 2 * k1b, k2a, k2b);
    f(t0 + h / 2, x1_ + h / 2 * k2a, x2_ + h / 2 * k2b, k3a, k3b);
    f(t0 + h, x1_ + h * k3a, x2_ + h * k3b, k4a, k4b);
    x1_ += h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
    x2_ += h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
  }
  double output(double u) const { return p_.kp * u + 2.0 * p_.ki * x2_; }

 private:
  PRParams p_;
  double x1_ = 0.0;
  double x2_ = 0.0;
};

const PRParams kParams{20.0, 1000.0, 0.01, 2.0 * pi * 50.0};
constexpr double kTs = 100e-6;

TEST(PRController, MatchesContinuousOracle) {
  const auto input = [](double t) {
    return std::sin(2 * pi * 50 * t) + 0.4 * std::cos(2 * pi * 130 * t + 0.3) + 0.5 * std::exp(-30 * t) +
           0.2 * std::sin(2 * pi * 7 * t);
  };
  PRController pr(kParams, kTs);
  ContinuousPR oracle(kParams);
  std::vector<double> diff;
  std::vector<double> ref;
  const int steps = 4000;
  const int sub = 100;
  for (int k = 0; k < steps; ++k) {
    const double t = k * kTs;
    const double y = pr.step(input(t));
    const double yc = oracle.output(input(t));
    diff.push_back(y - yc);
    ref.push_back(yc);
    for (int j = 0; j < sub; ++j) oracle.advance(input, t + j * kTs / sub, kTs / sub);
  }
  EXPECT_LE(rms(diff) / rms(ref), 0.01);
}

TEST(PRController, DcGainIsKp) {
  PRController pr(kParams, kTs);
  double y = 0.0;
  for (int k = 0; k < static_cast<int>(5.0 / kTs); ++k) y = pr.step(1.0);
  EXPECT_NEAR(y, kParams.kp, 0.01 * kParams.kp);
}

TEST(PRController, ResonanceGain) {
  PRController pr(kParams, kTs);
  const double w = kParams.omega;
  const int settle = static_cast<int>(3.0 / kTs);
  const int period = static_cast<int>(std::lround(2 * pi / w / kTs));
  double c = 0.0;
  double s = 0.0;
  for (int k = 0; k < settle + 5 * period; ++k) {
    const double t = k * kTs;
    const double y = pr.step(std::cos(w * t));
    if (k >= settle) {
      c += y * std::cos(w * t);
      s += y * std::sin(w * t);
    }
  }
  const double n = 5.0 * period;
  const double gain = 2.0 * std::hypot(c, s) / n;
  const double expect = kParams.kp + kParams.ki / (kParams.rho * w);
  EXPECT_NEAR(gain, expect, 0.01 * expect);
}

TEST(PRController, ResetAndValidation) {
  PRController pr(kParams, kTs);
  const double first = pr.step(1.0);
  pr.step(0.3);
  pr.reset();
  EXPECT_EQ(pr.step(1.0), first);
  EXPECT_THROW(PRController(PRParams{-1, 1, 0.01, 1}, kTs), std::invalid_argument);
  EXPECT_THROW(PRController(PRParams{1, 1, 0.0, 1}, kTs), std::invalid_argument);
  EXPECT_THROW(PRController(PRParams{1, 1, 0.01, 0}, kTs), std::invalid_argument);
  EXPECT_THROW(PRController(PRParams{1, 1, 0.01, 4e4}, kTs), std::invalid_argument);
  EXPECT_THROW(PRController(kParams, 0.0), std::invalid_argument);
}

// --- geometric power ------------------------------------------------------

TEST(GeometricPower, BasisCases) {
  const GeometricPower a = geometric_power({1, 0}, {1, 0});
  EXPECT_EQ(a.scalar, 1.0);
  EXPECT_EQ(a.bivector, 0.0);
  const GeometricPower b = geometric_power({1, 0}, {0, 1});
  EXPECT_EQ(b.scalar, 0.0);
  EXPECT_EQ(b.bivector, 1.0);
}

TEST(GeometricPower, EqualsKernelProduct) {
  std::mt19937 rng(testing::kDefaultSeed + 60);
  for (int k = 0; k < 100; ++k) {
    const auto v = testing::random_vector(rng, 2, 300.0);
    const auto i = testing::random_vector(rng, 2, 20.0);
    const GeometricPower m = geometric_power({v[0], v[1]}, {i[0], i[1]});
    const Multivector full = Multivector::vector(v) * Multivector::vector(i);
    EXPECT_LE(max_abs_difference(m.as_multivector(), full), 1e-12 * std::max(1.0, full.max_abs_coefficient()));
  }
}

TEST(ReferenceCurrents, InvertsGeometricPower) {
  const PlaneVector i = reference_currents({500.0, 0.0}, {250.0, 0.0});
  EXPECT_DOUBLE_EQ(i.p, 2.0);
  EXPECT_DOUBLE_EQ(i.s, 0.0);
  const PlaneVector z = reference_currents({0.0, 0.0}, {3.0, -4.0});
  EXPECT_EQ(z.p, 0.0);
  EXPECT_EQ(z.s, 0.0);
  EXPECT_THROW(reference_currents({1.0, 0.0}, {0.0, 0.0}), DegenerateMagnitude);

  std::mt19937 rng(testing::kDefaultSeed + 61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const PlaneVector v{300 * u(rng), 300 * u(rng)};
    const GeometricPower target{5000 * u(rng), 5000 * u(rng)};
    const GeometricPower back = geometric_power(v, reference_currents(target, v));
    EXPECT_NEAR(back.scalar, target.scalar, 1e-12 * 5000);
    EXPECT_NEAR(back.bivector, target.bivector, 1e-12 * 5000);
  }
}

// --- scenario -------------------------------------------------------------

TEST(Scenario, PsFrameHasNoResidualAndTracksPower) {
  const SimConfig cfg = SimConfig::defaults();
  const SimTrace trace = run_scenario(cfg);
  ASSERT_EQ(trace.records.size(), 2000u);
  std::size_t valid = 0;
  for (const SimRecord& r : trace.records) {
    if (!r.frame_valid) continue;
    ++valid;
    EXPECT_LE(std::abs(r.v_frame[2]), 1e-9) << r.t;
    EXPECT_EQ(r.rotor[1], 0.0) << r.t;
  }
  EXPECT_EQ(valid, 2000u - cfg.estimator.kappa);

  const ScenarioSummary sum = summarize(trace, cfg);
  ASSERT_EQ(sum.segments.size(), 2u);
  for (const SegmentPower& seg : sum.segments) {
    EXPECT_LE(seg.relative_error, 0.02);
    EXPECT_LE(seg.max_relative_error, 0.02);
  }
  ASSERT_EQ(sum.rotor_steps.size(), 2u);
  EXPECT_DOUBLE_EQ(sum.rotor_steps[0].time, 0.02);
  EXPECT_DOUBLE_EQ(sum.rotor_steps[1].time, 0.12);
  for (const RotorStep& st : sum.rotor_steps) EXPECT_GT(st.magnitude, 1e-3);
  EXPECT_LT(sum.rotor_steps[1].baseline, 0.1 * sum.rotor_steps[1].magnitude);
}

TEST(Scenario, ClarkeFrameShowsZeroSequence) {
  SimConfig cfg = SimConfig::defaults();
  cfg.frame = ControlFrame::Clarke;
  const SimTrace clarke = run_scenario(cfg);
  const ScenarioSummary sc = summarize(clarke, cfg);
  EXPECT_DOUBLE_EQ(sc.window_start, 0.03);
  EXPECT_DOUBLE_EQ(sc.window_end, 0.12);
  EXPECT_GT(sc.v0_rms, 0.01 * sc.alpha_beta_rms);

  cfg.frame = ControlFrame::PS;
  const ScenarioSummary sp = summarize(run_scenario(cfg), cfg);
  EXPECT_GE(sc.v0_rms, 1e3 * sp.residual_rms);
}

TEST(Scenario, BalancedGridZeroReferenceDecays) {
  SimConfig cfg = SimConfig::defaults();
  cfg.grid_after = cfg.grid_before;
  cfg.impedance_scale = {1.0, 1.0, 1.0};
  cfg.power_schedule = {{0.0, 0.0, 0.0}};
  cfg.initial_current = {10.0, -4.0, -6.0};
  const SimTrace trace = run_scenario(cfg);
  const SimRecord& last = trace.records.back();
  for (double i : last.i_abc) EXPECT_LE(std::abs(i), 1e-3 * 10.0);
  EXPECT_LE(std::abs(last.p0), 1.0);
}

TEST(Scenario, OpenLoopPlantIsFrameAgnostic) {
  SimConfig cfg = SimConfig::defaults();
  cfg.open_loop = true;
  cfg.initial_current = {5.0, -1.0, 2.0};
  const SimTrace ps = run_scenario(cfg);
  cfg.frame = ControlFrame::Clarke;
  const SimTrace cl = run_scenario(cfg);
  ASSERT_EQ(ps.records.size(), cl.records.size());
  for (std::size_t k = 0; k < ps.records.size(); ++k) {
    EXPECT_EQ(ps.records[k].i_abc, cl.records[k].i_abc);
    EXPECT_EQ(ps.records[k].v_abc, cl.records[k].v_abc);
  }
}

TEST(Scenario, Deterministic) {
  const SimConfig cfg = SimConfig::defaults();
  std::ostringstream a;
  std::ostringstream b;
  write_trace_csv(run_scenario(cfg), a);
  write_trace_csv(run_scenario(cfg), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Scenario, TraceColumns) {
  SimConfig cfg = SimConfig::defaults();
  cfg.horizon = 0.001;
  cfg.unbalance_time = 0.0005;
  cfg.power_schedule = {{0.0, 100.0, 0.0}};
  std::ostringstream out;
  write_trace_csv(run_scenario(cfg), out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "t,v1,v2,v3,i1,i2,i3,v_p,v_s,v_res,i_p,i_s,i_res,i_p_ref,i_s_ref,v0,p0,p0_ref,r_0,r_12,r_13,r_23,"
            "valid,transition");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 10u);
}

TEST(Scenario, ValidationErrors) {
  SimConfig cfg = SimConfig::defaults();
  cfg.filter_inductance = 0.0;
  EXPECT_THROW(run_scenario(cfg), std::invalid_argument);
  cfg = SimConfig::defaults();
  cfg.power_schedule = {{0.1, 1.0, 0.0}, {0.05, 1.0, 0.0}};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SimConfig::defaults();
  cfg.unbalance_time = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Scenario, ReferenceSchedule) {
  const SimConfig cfg = SimConfig::defaults();
  EXPECT_EQ(cfg.reference_at(0.0).p0, 3000.0);
  EXPECT_EQ(cfg.reference_at(0.1199).p0, 3000.0);
  EXPECT_EQ(cfg.reference_at(0.12).p0, 9000.0);
}

// --- scenario config ------------------------------------------------------

TEST(ScenarioConfig, RoundTripAndOverrides) {
  const SimConfig d = SimConfig::defaults();
  std::istringstream in(format_scenario_config(d));
  const SimConfig r = parse_scenario_config(in);
  EXPECT_EQ(format_scenario_config(r), format_scenario_config(d));

  std::istringstream custom(
      "# comment line\n"
      "Ts = 5e-5\n"
      "horizon=0.1   # trailing comment\n"
      "grid_freq=60\n"
      "power_schedule=0:1000,0.05:2000:500\n"
      "frame=Clarke\n"
      "kappa=4\n");
  const SimConfig c = parse_scenario_config(custom);
  EXPECT_EQ(c.sample_period, 5e-5);
  EXPECT_EQ(c.estimator.sample_period, 5e-5);
  EXPECT_EQ(c.estimator.kappa, 4u);
  EXPECT_EQ(c.frame, ControlFrame::Clarke);
  EXPECT_NEAR(c.pr.omega, 2 * pi * 60, 1e-12);
  ASSERT_EQ(c.power_schedule.size(), 2u);
  EXPECT_EQ(c.power_schedule[1].n, 500.0);
}

TEST(ScenarioConfig, Errors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_scenario_config(in);
  };
  EXPECT_THROW(parse("bogus=1\n"), ConfigError);
  EXPECT_THROW(parse("Ts\n"), ConfigError);
  EXPECT_THROW(parse("Ts=abc\n"), ConfigError);
  EXPECT_THROW(parse("kappa=2.5\n"), ConfigError);
  EXPECT_THROW(parse("frame=dq\n"), ConfigError);
  EXPECT_THROW(parse("grid_before=1:0,2\n"), ConfigError);
  EXPECT_THROW(parse("Lf=-1\n"), ConfigError);
  EXPECT_THROW(load_scenario_config("/nonexistent/scenario.cfg"), CsvIoError);
}

}  // namespace
}  // namespace geoframe
