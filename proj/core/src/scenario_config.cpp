#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "geoframe/converter.hpp"

namespace geoframe {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

double number(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError("key '" + key + "': not a number: '" + text + "'");
  }
}

bool boolean(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + text + "'");
}

std::array<double, 3> triple(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("key '" + key + "': expected three values");
  return {number(key, parts[0]), number(key, parts[1]), number(key, parts[2])};
}

std::vector<Phasor> phasors(const std::string& key, const std::string& text) {
  std::vector<Phasor> out;
  for (const std::string& item : split(text, ',')) {
    const auto fields = split(item, ':');
    if (fields.size() != 2) throw ConfigError("key '" + key + "': phasor must be V:phi");
    out.push_back({number(key, fields[0]), number(key, fields[1])});
  }
  return out;
}

std::vector<PowerStep> schedule(const std::string& key, const std::string& text) {
  std::vector<PowerStep> out;
  for (const std::string& item : split(text, ',')) {
    const auto fields = split(item, ':');
    if (fields.size() != 2 && fields.size() != 3) {
      throw ConfigError("key '" + key + "': step must be t:p0[:N]");
    }
    out.push_back({number(key, fields[0]), number(key, fields[1]),
                   fields.size() == 3 ? number(key, fields[2]) : 0.0});
  }
  return out;
}

std::string join_triple(const std::array<double, 3>& v) {
  return format_double(v[0]) + "," + format_double(v[1]) + "," + format_double(v[2]);
}

std::string join_phasors(const std::vector<Phasor>& ps) {
  std::string out;
  for (const Phasor& p : ps) {
    if (!out.empty()) out += ',';
    out += format_double(p.amplitude) + ":" + format_double(p.phase);
  }
  return out;
}

}  // namespace

SimConfig parse_scenario_config(std::istream& in) {
  SimConfig cfg = SimConfig::defaults();
  bool resonance_given = false;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"Ts", [&](auto& k, auto& v) { cfg.sample_period = number(k, v); }},
      {"horizon", [&](auto& k, auto& v) { cfg.horizon = number(k, v); }},
      {"Lf", [&](auto& k, auto& v) { cfg.filter_inductance = number(k, v); }},
      {"Rf", [&](auto& k, auto& v) { cfg.filter_resistance = number(k, v); }},
      {"grid_freq", [&](auto& k, auto& v) { cfg.grid_frequency = number(k, v); }},
      {"grid_before", [&](auto& k, auto& v) { cfg.grid_before = phasors(k, v); }},
      {"grid_after", [&](auto& k, auto& v) { cfg.grid_after = phasors(k, v); }},
      {"unbalance_time", [&](auto& k, auto& v) { cfg.unbalance_time = number(k, v); }},
      {"grid_R", [&](auto& k, auto& v) { cfg.grid_resistance = number(k, v); }},
      {"grid_L", [&](auto& k, auto& v) { cfg.grid_inductance = number(k, v); }},
      {"impedance_scale", [&](auto& k, auto& v) { cfg.impedance_scale = triple(k, v); }},
      {"power_schedule", [&](auto& k, auto& v) { cfg.power_schedule = schedule(k, v); }},
      {"frame",
       [&](auto& k, auto& v) {
         if (v == "PS" || v == "ps") {
           cfg.frame = ControlFrame::PS;
         } else if (v == "Clarke" || v == "clarke") {
           cfg.frame = ControlFrame::Clarke;
         } else {
           throw ConfigError("key '" + k + "': expected PS or Clarke");
         }
       }},
      {"pr_kp", [&](auto& k, auto& v) { cfg.pr.kp = number(k, v); }},
      {"pr_ki", [&](auto& k, auto& v) { cfg.pr.ki = number(k, v); }},
      {"pr_rho", [&](auto& k, auto& v) { cfg.pr.rho = number(k, v); }},
      {"pr_omega",
       [&](auto& k, auto& v) {
         cfg.pr.omega = number(k, v);
         resonance_given = true;
       }},
      {"kappa",
       [&](auto& k, auto& v) {
         const double x = number(k, v);
         if (!(x >= 1.0) || x != static_cast<double>(static_cast<std::size_t>(x))) {
           throw ConfigError("key 'kappa': expected a positive integer");
         }
         cfg.estimator.kappa = static_cast<std::size_t>(x);
       }},
      {"hold_last_on_degenerate",
       [&](auto& k, auto& v) { cfg.estimator.hold_last_on_degenerate = boolean(k, v); }},
      {"tau_collinear", [&](auto& k, auto& v) { cfg.estimator.collinear_tolerance = number(k, v); }},
      {"open_loop", [&](auto& k, auto& v) { cfg.open_loop = boolean(k, v); }},
      {"initial_current", [&](auto& k, auto& v) { cfg.initial_current = triple(k, v); }},
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }
  if (!resonance_given) cfg.pr.omega = 2.0 * std::numbers::pi * cfg.grid_frequency;
  cfg.estimator.sample_period = cfg.sample_period;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvIoError("cannot open " + path.string());
  return parse_scenario_config(in);
}

std::string format_scenario_config(const SimConfig& cfg) {
  std::ostringstream out;
  std::string sched;
  for (const PowerStep& s : cfg.power_schedule) {
    if (!sched.empty()) sched += ',';
    sched += format_double(s.time) + ":" + format_double(s.p0) + ":" + format_double(s.n);
  }
  out << "Ts=" << format_double(cfg.sample_period) << '\n'
      << "horizon=" << format_double(cfg.horizon) << '\n'
      << "Lf=" << format_double(cfg.filter_inductance) << '\n'
      << "Rf=" << format_double(cfg.filter_resistance) << '\n'
      << "grid_freq=" << format_double(cfg.grid_frequency) << '\n'
      << "grid_before=" << join_phasors(cfg.grid_before) << '\n'
      << "grid_after=" << join_phasors(cfg.grid_after) << '\n'
      << "unbalance_time=" << format_double(cfg.unbalance_time) << '\n'
      << "grid_R=" << format_double(cfg.grid_resistance) << '\n'
      << "grid_L=" << format_double(cfg.grid_inductance) << '\n'
      << "impedance_scale=" << join_triple(cfg.impedance_scale) << '\n'
      << "power_schedule=" << sched << '\n'
      << "frame=" << to_string(cfg.frame) << '\n'
      << "pr_kp=" << format_double(cfg.pr.kp) << '\n'
      << "pr_ki=" << format_double(cfg.pr.ki) << '\n'
      << "pr_rho=" << format_double(cfg.pr.rho) << '\n'
      << "pr_omega=" << format_double(cfg.pr.omega) << '\n'
      << "kappa=" << cfg.estimator.kappa << '\n'
      << "hold_last_on_degenerate=" << (cfg.estimator.hold_last_on_degenerate ? "true" : "false") << '\n'
      << "tau_collinear=" << format_double(cfg.estimator.collinear_tolerance) << '\n'
      << "open_loop=" << (cfg.open_loop ? "true" : "false") << '\n'
      << "initial_current=" << join_triple(cfg.initial_current) << '\n';
  return out.str();
}

}  // namespace geoframe
