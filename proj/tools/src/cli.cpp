#include "geoframe_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "geoframe/geoframe.hpp"

namespace geoframe::cli {

namespace {

/// Raised for malformed flag values detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void kv(std::ostream& out, const std::string& key, double value) { out << key << '=' << fmt(value) << '\n'; }

void kv(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << '=' << value << '\n';
}

std::vector<Phasor> parse_phasors(const std::string& text) {
  std::vector<Phasor> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("phasor '" + item + "' must be V:phi");
    try {
      out.push_back({parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
    } catch (const std::invalid_argument&) {
      throw UsageError("phasor '" + item + "' is not numeric");
    }
  }
  if (out.empty()) throw UsageError("--phases is empty");
  return out;
}

MethodChoice parse_method(const std::string& text) {
  if (text == "auto") return MethodChoice::Auto;
  if (text == "direct3d") return MethodChoice::Direct3D;
  if (text == "twostep") return MethodChoice::TwoStepND;
  throw UsageError("--method must be auto, direct3d or twostep");
}

/// Output sink: a file, or `out` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) {
    if (path == "-") {
      stream_ = &out;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw CsvIoError("cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw CsvIoError("write failed: " + path);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

/// t1 = first row whose norm is non-negligible; t2 = row best conditioned
/// against it.
std::pair<std::size_t, std::size_t> default_pair(const SampleSeries& series) {
  if (series.size() < 2) throw UsageError("need at least two rows to identify a plane");
  double peak = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    double n2 = 0.0;
    for (double x : series.row(i)) n2 += x * x;
    peak = std::max(peak, std::sqrt(n2));
  }
  std::size_t first = 0;
  for (; first < series.size(); ++first) {
    double n2 = 0.0;
    for (double x : series.row(first)) n2 += x * x;
    if (std::sqrt(n2) > 1e-6 * peak && std::sqrt(n2) > kZeroTolerance) break;
  }
  if (first >= series.size() - 1) return {0, 1};
  std::size_t best = first + 1;
  double best_cond = -1.0;
  for (std::size_t j = first + 1; j < series.size(); ++j) {
    const double c = sample_conditioning(series.row(first), series.row(j));
    if (c > best_cond) {
      best_cond = c;
      best = j;
    }
  }
  return {first, best};
}

void print_bivector(std::ostream& out, const std::string& prefix, const Multivector& b) {
  const int n = b.dimension();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != 2) continue;
    kv(out, prefix + blade_label(static_cast<BladeMask>(mask), n), b.coefficient(static_cast<BladeMask>(mask)));
  }
}

void print_terms(std::ostream& out, const std::string& prefix, const Multivector& m) {
  std::vector<Term> terms(m.terms().begin(), m.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return blade_grade(a.mask) != blade_grade(b.mask) ? blade_grade(a.mask) < blade_grade(b.mask)
                                                      : a.mask < b.mask;
  });
  if (terms.empty() || terms.front().mask != 0) kv(out, prefix + "0", 0.0);
  for (const Term& t : terms) kv(out, prefix + blade_label(t.mask, m.dimension()), t.coeff);
}

void print_frame(std::ostream& out, const FrameTransform& frame) {
  const int n = frame.plane.dimension();
  kv(out, "n", static_cast<double>(n));
  kv(out, "method", to_string(frame.method));
  kv(out, "t1", frame.t1);
  kv(out, "t2", frame.t2);
  print_bivector(out, "B_", frame.plane);
  kv(out, "B_norm", norm(frame.plane));
  kv(out, "theta_rad", frame.theta);
  kv(out, "theta_deg", frame.theta * 180.0 / std::numbers::pi);
  kv(out, "cos_theta", std::cos(frame.theta));
  kv(out, "unbalance_degree", std::sin(frame.theta));
  if (frame.rotation_plane) {
    kv(out, "L_13", frame.rotation_plane->coefficient(blade_of({1, 3})));
    kv(out, "L_23", frame.rotation_plane->coefficient(blade_of({2, 3})));
  }
  print_terms(out, "R_", frame.rotor.value());
  if (frame.vector_rotor) print_terms(out, "R1_", frame.vector_rotor->value());
  if (frame.plane_rotor) print_terms(out, "R2_", frame.plane_rotor->value());
  kv(out, "alignment_residual", alignment_residual(frame));
  kv(out, "rotor_unitarity_error", unitarity_error(frame.rotor.value()));
}

std::string transform_header(std::size_t n) {
  std::string h = "t,p,s";
  for (std::size_t k = 1; k + 2 <= n; ++k) h += ",res" + std::to_string(k);
  return h;
}

void write_transformed(std::ostream& out, double t, const TransformedSample& s) {
  out << format_double(t) << ',' << format_double(s.p) << ',' << format_double(s.s);
  for (double r : s.residual) out << ',' << format_double(r);
  out << '\n';
}

SampleSeries load(const std::string& path) { return read_csv(std::filesystem::path(path)); }

std::size_t check_row(const SampleSeries& series, long index, const char* flag) {
  if (index < 0 || static_cast<std::size_t>(index) >= series.size()) {
    throw UsageError(std::string(flag) + " index " + std::to_string(index) + " outside 0.." +
                     std::to_string(series.size() == 0 ? 0 : series.size() - 1));
  }
  return static_cast<std::size_t>(index);
}

std::pair<std::size_t, std::size_t> select_pair(const SampleSeries& series, long t1, long t2) {
  if (series.phase_count() < 3) throw UsageError("frame identification needs at least 3 phases");
  if ((t1 < 0) != (t2 < 0)) throw UsageError("--t1 and --t2 go together");
  if (t1 < 0) return default_pair(series);
  return {check_row(series, t1, "--t1"), check_row(series, t2, "--t2")};
}

FrameTransform frame_for(const SampleSeries& series, std::pair<std::size_t, std::size_t> rows,
                         MethodChoice method, double tau) {
  const auto [i1, i2] = rows;
  return identify_frame(series.row(i1), series.row(i2), series.time(i1), series.time(i2), method, tau);
}

FrameTransform frame_for(const SampleSeries& series, long t1, long t2, MethodChoice method, double tau) {
  return frame_for(series, select_pair(series, t1, t2), method, tau);
}

// ---------------------------------------------------------------------------

struct Options {
  // gen
  std::string phases;
  double freq = 50.0;
  double fs = 10e3;
  double dur = 0.04;
  // shared
  std::string in;
  std::string out = "-";
  long t1 = -1;
  long t2 = -1;
  std::string method = "auto";
  double tau = kCollinearTolerance;
  // transform
  bool frozen = false;
  std::size_t kappa = 0;
  // simulate
  std::string config;
  std::string frame;
};

int cmd_gen(const Options& o, std::ostream& out) {
  const PhasorSpec spec = PhasorSpec::from_frequency(o.freq, parse_phasors(o.phases));
  const SampleSeries series = sample_series(spec, o.fs, o.dur);
  Sink sink(o.out, out);
  write_csv(series, sink.get());
  sink.finish(o.out);
  return kExitOk;
}

int cmd_identify(const Options& o, std::ostream& out) {
  const SampleSeries series = load(o.in);
  const auto rows = select_pair(series, o.t1, o.t2);
  const FrameTransform frame = frame_for(series, rows, parse_method(o.method), o.tau);
  print_frame(out, frame);
  const auto r1 = series.row(rows.first);
  const auto r2 = series.row(rows.second);
  kv(out, "row1", static_cast<double>(rows.first));
  kv(out, "row2", static_cast<double>(rows.second));
  kv(out, "conditioning", sample_conditioning(r1, r2));
  const auto report = assess_samples(r1, r2, o.tau);
  kv(out, "kind", report ? to_string(report->kind) : "none");
  return kExitOk;
}

int cmd_transform(const Options& o, std::ostream& out) {
  if (o.frozen && o.kappa > 0) throw UsageError("--frozen-frame and --kappa are exclusive");
  const SampleSeries series = load(o.in);
  const std::size_t n = series.phase_count();
  if (n < 3) throw UsageError("transform needs at least 3 phases");

  if (o.kappa == 0) {
    const FrameTransform frame = frame_for(series, o.t1, o.t2, parse_method(o.method), o.tau);
    Sink sink(o.out, out);
    sink.get() << transform_header(n) << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
      write_transformed(sink.get(), series.time(i), transform_sample(frame, series.row(i)));
    }
    sink.finish(o.out);
    return kExitOk;
  }

  EstimatorConfig cfg;
  cfg.kappa = o.kappa;
  cfg.collinear_tolerance = o.tau;
  cfg.method = parse_method(o.method);
  if (series.size() >= 2) cfg.sample_period = series.time(1) - series.time(0);
  FrameEstimator estimator(n, cfg);
  std::ostringstream body;
  std::size_t emitted = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto estimate = estimator.push_sample(series.row(i), series.time(i));
    if (!estimate) continue;
    write_transformed(body, series.time(i), transform_sample(estimate->frame, series.row(i)));
    ++emitted;
  }
  if (emitted == 0 && estimator.degenerate_count() > 0) {
    const auto report = assess_samples(series.row(0), series.row(o.kappa), o.tau);
    throw DegenerateSamples(report.value_or(DegeneracyReport{DegeneracyKind::Collinear, 0.0}));
  }
  Sink sink(o.out, out);
  sink.get() << transform_header(n) << '\n' << body.str();
  sink.finish(o.out);
  return kExitOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const SampleSeries series = load(o.in);
  const FrameTransform frame = frame_for(series, o.t1, o.t2, MethodChoice::Auto, o.tau);
  const UnbalanceDiagnostic diag = unbalance_diagnostic(frame.plane);
  double planarity = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto row = series.row(i);
    double mag = 0.0;
    for (double x : row) mag = std::max(mag, std::abs(x));
    if (mag == 0.0) continue;
    for (double r : transform_sample(frame, row).residual) planarity = std::max(planarity, std::abs(r) / mag);
  }
  kv(out, "n", static_cast<double>(series.phase_count()));
  kv(out, "rows", static_cast<double>(series.size()));
  print_bivector(out, "B_", frame.plane);
  kv(out, "theta_rad", diag.theta);
  kv(out, "theta_deg", diag.theta * 180.0 / std::numbers::pi);
  kv(out, "unbalance_degree", diag.degree);
  kv(out, "planarity_residual", planarity);
  return kExitOk;
}

int cmd_compare_clarke(const Options& o, std::ostream& out) {
  const SampleSeries series = load(o.in);
  if (series.phase_count() != 3) throw UsageError("compare-clarke needs a three-phase file");
  const FrameTransform frame = frame_for(series, o.t1, o.t2, MethodChoice::Auto, o.tau);
  std::vector<double> p, s, res, alpha, beta, zero;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const TransformedSample ts = transform_sample(frame, series.row(i));
    const ClarkeComponents c = clarke_transform(series.row(i));
    p.push_back(ts.p);
    s.push_back(ts.s);
    res.push_back(ts.residual[0]);
    alpha.push_back(c.alpha);
    beta.push_back(c.beta);
    zero.push_back(c.zero);
  }
  if (!o.out.empty()) {
    Sink sink(o.out, out);
    sink.get() << "t,p,s,res1,alpha,beta,zero\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      sink.get() << format_double(series.time(i)) << ',' << format_double(p[i]) << ',' << format_double(s[i])
                 << ',' << format_double(res[i]) << ',' << format_double(alpha[i]) << ','
                 << format_double(beta[i]) << ',' << format_double(zero[i]) << '\n';
    }
    sink.finish(o.out);
  }
  kv(out, "rms_p", rms(p));
  kv(out, "rms_s", rms(s));
  kv(out, "rms_residual", rms(res));
  kv(out, "rms_alpha", rms(alpha));
  kv(out, "rms_beta", rms(beta));
  kv(out, "rms_zero", rms(zero));
  kv(out, "theta_rad", frame.theta);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SimConfig cfg = o.config.empty() ? SimConfig::defaults() : load_scenario_config(o.config);
  if (o.frame == "PS" || o.frame == "ps") {
    cfg.frame = ControlFrame::PS;
  } else if (o.frame == "Clarke" || o.frame == "clarke") {
    cfg.frame = ControlFrame::Clarke;
  } else if (!o.frame.empty()) {
    throw UsageError("--frame must be PS or Clarke");
  }
  const SimTrace trace = run_scenario(cfg);
  if (!o.out.empty()) {
    Sink sink(o.out, out);
    write_trace_csv(trace, sink.get());
    sink.finish(o.out);
  }
  const ScenarioSummary sum = summarize(trace, cfg);
  kv(out, "frame", to_string(trace.frame));
  kv(out, "samples", static_cast<double>(trace.records.size()));
  kv(out, "residual_max", sum.residual_max);
  kv(out, "residual_rms", sum.residual_rms);
  kv(out, "v0_rms", sum.v0_rms);
  kv(out, "alpha_beta_rms", sum.alpha_beta_rms);
  kv(out, "window_start", sum.window_start);
  kv(out, "window_end", sum.window_end);
  for (std::size_t k = 0; k < sum.segments.size(); ++k) {
    const SegmentPower& seg = sum.segments[k];
    const std::string prefix = "segment" + std::to_string(k) + "_";
    kv(out, prefix + "start", seg.start);
    kv(out, prefix + "end", seg.end);
    kv(out, prefix + "p0_ref", seg.p0_ref);
    kv(out, prefix + "p0_mean", seg.p0_cycle_mean);
    kv(out, prefix + "relative_error", seg.relative_error);
    kv(out, prefix + "max_relative_error", seg.max_relative_error);
  }
  for (std::size_t k = 0; k < sum.rotor_steps.size(); ++k) {
    const std::string prefix = "rotor_step" + std::to_string(k) + "_";
    kv(out, prefix + "time", sum.rotor_steps[k].time);
    kv(out, prefix + "magnitude", sum.rotor_steps[k].magnitude);
    kv(out, prefix + "baseline", sum.rotor_steps[k].baseline);
  }
  return kExitOk;
}

void add_pair_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--t1", o.t1, "Row index of the first sample")->check(CLI::NonNegativeNumber);
  cmd->add_option("--t2", o.t2, "Row index of the second sample")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tau", o.tau, "Collinearity tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric-algebra frame identification for multi-phase signals", "geoframe"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Synthesize a sinusoidal n-phase CSV");
  gen->add_option("--phases", o.phases, "Comma-separated V:phi list (phi in radians)")->required();
  gen->add_option("--freq", o.freq, "Frequency in Hz")->check(CLI::PositiveNumber);
  gen->add_option("--fs", o.fs, "Sampling rate in Hz")->check(CLI::PositiveNumber);
  gen->add_option("--dur", o.dur, "Duration in seconds")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", o.out, "Output CSV ('-' for stdout)");

  auto* identify = app.add_subcommand("identify", "Identify the plane and rotor from two rows");
  identify->add_option("--in", o.in, "Input CSV")->required();
  add_pair_flags(identify, o);
  identify->add_option("--method", o.method, "auto, direct3d or twostep");

  auto* transform = app.add_subcommand("transform", "Rotate every row into the ps frame");
  transform->add_option("--in", o.in, "Input CSV")->required();
  transform->add_option("--out", o.out, "Output CSV ('-' for stdout)");
  transform->add_flag("--frozen-frame", o.frozen, "One frame for all rows (default)");
  transform->add_option("--kappa", o.kappa, "Re-estimate from rows kappa apart")->check(CLI::PositiveNumber);
  add_pair_flags(transform, o);
  transform->add_option("--method", o.method, "auto, direct3d or twostep");

  auto* analyze = app.add_subcommand("analyze", "Print the unbalance diagnostic");
  analyze->add_option("--in", o.in, "Input CSV")->required();
  add_pair_flags(analyze, o);

  auto* compare = app.add_subcommand("compare-clarke", "Side-by-side ps and Clarke components");
  compare->add_option("--in", o.in, "Input CSV")->required();
  compare->add_option("--out", o.out, "Output CSV ('-' for stdout)");
  add_pair_flags(compare, o);

  auto* simulate = app.add_subcommand("simulate", "Run the converter scenario");
  simulate->add_option("--config", o.config, "Scenario file (defaults when omitted)");
  simulate->add_option("--out", o.out, "Trace CSV ('-' for stdout)");
  simulate->add_option("--frame", o.frame, "Override the control frame: PS or Clarke");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  // Options shared by several subcommands keep the defaults of the one in use.
  if (simulate->parsed() && o.out == "-" && simulate->count("--out") == 0) o.out.clear();
  if (compare->parsed() && compare->count("--out") == 0) o.out.clear();

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (identify->parsed()) return cmd_identify(o, out);
    if (transform->parsed()) return cmd_transform(o, out);
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (compare->parsed()) return cmd_compare_clarke(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
  } catch (const DegenerateSamples& e) {
    kv(out, "kind", to_string(e.report().kind));
    kv(out, "conditioning", e.report().conditioning);
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const CsvParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CsvIoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace geoframe::cli
