// Copyright 2026 The homsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "homsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "homsim/error.hpp"
#include "homsim/units.hpp"

namespace homsim {
namespace {

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

const std::set<std::string>& arm_keys() {
  static const std::set<std::string> keys{"omega", "delta", "delta_stark", "g", "g0", "alpha",
                                          "beta", "beta_sq", "kappa", "gamma_sp", "gamma_dp",
                                          "pulse_on", "pulse_off", "eta", "detect_prob"};
  return keys;
}

const std::map<std::string, std::set<std::string>>& section_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"short", arm_keys()},
      {"long", arm_keys()},
      {"both", arm_keys()},
      {"grid", {"dt", "t_horizon", "bin", "windows", "window_max"}},
      {"imperfections",
       {"epsilon", "omega_offset", "sigma_drift", "sqrt_v", "t_bar", "tau_gen", "background"}},
      {"timing",
       {"trigger_period", "delay_line", "async_start", "t_wait", "first_trigger", "trials",
        "seed"}},
      {"sweep", {"omega", "windows", "window_max", "objective", "threshold", "refine",
                 "refine_iterations"}},
      {"output", {"dir", "kernel_stride"}},
  };
  return keys;
}

/// Groups of mutually exclusive ways to give one quantity.
const std::vector<std::pair<std::set<std::string>, std::set<std::string>>>& alternatives() {
  static const std::vector<std::pair<std::set<std::string>, std::set<std::string>>> groups{
      {{"g"}, {"g0", "alpha", "beta", "beta_sq"}},
      {{"beta"}, {"beta_sq"}},
      {{"eta"}, {"detect_prob"}},
      {{"sigma_drift"}, {"sqrt_v", "t_bar"}},
  };
  return groups;
}

void check_key(const std::string& section, const std::string& key, const std::string& where) {
  const auto& table = section_keys();
  const auto it = table.find(section);
  if (it == table.end()) throw ConfigError(where + "unknown section [" + section + "]");
  if (!it->second.contains(key)) {
    throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
  }
}

struct Unit {
  std::string_view name;
  double scale;
};

/// Splits "12.5 MHz" into number and unit text.
std::pair<double, std::string_view> split_quantity(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "'");
  }
  return {value, trim(text.substr(static_cast<std::size_t>(ptr - text.data())))};
}

double with_unit(std::string_view text, std::initializer_list<Unit> table, const char* kind) {
  const auto [value, unit] = split_quantity(text);
  if (unit.empty()) {
    throw ConfigError(std::string("missing ") + kind + " unit in '" + std::string(trim(text)) + "'");
  }
  for (const auto& u : table) {
    if (unit == u.name) return value * u.scale;
  }
  throw ConfigError("unknown " + std::string(kind) + " unit '" + std::string(unit) + "' in '" +
                    std::string(trim(text)) + "'");
}

/// Number with an optional unit drawn from `allowed` (all scale 1).
double optional_unit(std::string_view text, std::initializer_list<std::string_view> allowed) {
  const auto [value, unit] = split_quantity(text);
  if (unit.empty()) return value;
  for (auto a : allowed) {
    if (unit == a) return value;
  }
  throw ConfigError("unexpected unit '" + std::string(unit) + "' in '" + std::string(trim(text)) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (item.empty()) throw ConfigError("empty element in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// List whose elements may omit the unit given on the last element.
template <typename F>
std::vector<double> parse_list(std::string_view text, F parse_one) {
  std::vector<std::string> items = split_list(text);
  const auto [last_value, last_unit] = split_quantity(items.back());
  (void)last_value;
  std::vector<double> out;
  for (auto& item : items) {
    const auto [v, unit] = split_quantity(item);
    (void)v;
    out.push_back(parse_one(unit.empty() && !last_unit.empty() ? item + " " + std::string(last_unit)
                                                               : item));
  }
  return out;
}

std::uint64_t parse_count(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid non-negative integer '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Reads one section with per-key error context.
class SectionReader {
 public:
  SectionReader(const RawConfig& raw, std::string name) : name_(std::move(name)) {
    const auto it = raw.sections().find(name_);
    if (it != raw.sections().end()) values_ = &it->second;
  }

  bool has(const std::string& key) const { return values_ && values_->contains(key); }

  template <typename F>
  auto get(const std::string& key, F parse) const -> std::optional<decltype(parse(std::string_view{}))> {
    if (!has(key)) return std::nullopt;
    try {
      return parse(std::string_view(values_->at(key)));
    } catch (const ConfigError& e) {
      throw ConfigError("[" + name_ + "] " + key + ": " + e.what());
    }
  }

  template <typename F, typename T>
  void read(const std::string& key, F parse, T& target) const {
    if (auto v = get(key, parse)) target = *v;
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* values_ = nullptr;
};

ArmConfig resolve_arm(const RawConfig& raw, const std::string& name) {
  const SectionReader r(raw, name);
  ArmConfig arm;
  SourceParams& p = arm.params;
  r.read("omega", parse_frequency, p.omega_drive);
  r.read("delta", parse_frequency, p.delta);
  if (r.has("delta_stark")) {
    p.delta_stark = r.get("delta_stark", [](std::string_view t) -> std::optional<double> {
                      if (trim(t) == "auto") return std::nullopt;
                      return parse_frequency(t);
                    }).value();
  }
  r.read("kappa", parse_frequency, p.kappa);
  r.read("gamma_sp", parse_frequency, p.gamma_sp);
  r.read("gamma_dp", parse_frequency, p.gamma_dp);
  r.read("pulse_on", parse_time, p.pulse_on);
  r.read("pulse_off", parse_time, p.pulse_off);

  const bool any_factor = r.has("g0") || r.has("alpha") || r.has("beta") || r.has("beta_sq");
  if (r.has("g") && any_factor) {
    throw ConfigError("[" + name + "] give either g or g0 with alpha and beta, not both");
  }
  if (r.has("g")) {
    p.g_eff = *r.get("g", parse_frequency);
  } else if (any_factor) {
    if (r.has("beta") && r.has("beta_sq")) {
      throw ConfigError("[" + name + "] give either beta or beta_sq, not both");
    }
    if (!r.has("g0") || !r.has("alpha") || !(r.has("beta") || r.has("beta_sq"))) {
      throw ConfigError("[" + name + "] coupling needs g0, alpha and beta (or beta_sq)");
    }
    const double g0 = *r.get("g0", parse_frequency);
    const double alpha = *r.get("alpha", parse_number);
    const double beta = r.has("beta") ? *r.get("beta", parse_number)
                                      : std::sqrt(*r.get("beta_sq", parse_number));
    p.g_eff = effective_coupling(g0, alpha, beta);
  }
  if (r.has("eta") && r.has("detect_prob")) {
    throw ConfigError("[" + name + "] give either eta or detect_prob, not both");
  }
  arm.eta = r.get("eta", parse_number);
  arm.detect_prob = r.get("detect_prob", parse_number);
  if (arm.eta && !(*arm.eta >= 0.0 && *arm.eta <= 1.0)) {
    throw ConfigError("[" + name + "] eta must lie in [0, 1]");
  }
  if (arm.detect_prob && !(*arm.detect_prob >= 0.0 && *arm.detect_prob <= 1.0)) {
    throw ConfigError("[" + name + "] detect_prob must lie in [0, 1]");
  }
  return arm;
}

void write_arm(std::ostream& out, const std::string& name, const ArmConfig& arm) {
  const SourceParams& p = arm.params;
  out << '[' << name << "]\n";
  out << "omega = " << fmt(p.omega_drive) << " rad/us\n";
  out << "delta = " << fmt(p.delta) << " rad/us\n";
  out << "delta_stark = " << (p.delta_stark ? fmt(*p.delta_stark) + " rad/us" : "auto") << '\n';
  out << "g = " << fmt(p.g_eff) << " rad/us\n";
  out << "kappa = " << fmt(p.kappa) << " rad/us\n";
  out << "gamma_sp = " << fmt(p.gamma_sp) << " rad/us\n";
  out << "gamma_dp = " << fmt(p.gamma_dp) << " rad/us\n";
  out << "pulse_on = " << fmt(p.pulse_on) << " us\n";
  out << "pulse_off = " << fmt(p.pulse_off) << " us\n";
  if (arm.eta) out << "eta = " << fmt(*arm.eta) << '\n';
  if (arm.detect_prob) out << "detect_prob = " << fmt(*arm.detect_prob) << '\n';
}

std::string join(const std::vector<double>& values, const char* unit) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]) + " " + unit;
  }
  return out;
}

}  // namespace

double parse_frequency(std::string_view text) {
  return with_unit(text,
                   {{"MHz", units::kTwoPi},
                    {"kHz", units::kTwoPi * 1e-3},
                    {"Hz", units::kTwoPi * 1e-6},
                    {"GHz", units::kTwoPi * 1e3},
                    {"rad/us", 1.0}},
                   "frequency");
}

double parse_time(std::string_view text) {
  return with_unit(text, {{"us", 1.0}, {"ns", 1e-3}, {"ps", 1e-6}, {"ms", 1e3}, {"s", 1e6}},
                   "time");
}

double parse_number(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_number(text.substr(0, slash));
    const double den = parse_number(text.substr(slash + 1));
    if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  const auto [value, unit] = split_quantity(text);
  if (!unit.empty()) {
    throw ConfigError("unexpected unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
  }
  return value;
}

RawConfig RawConfig::parse(std::istream& in, const std::string& source) {
  RawConfig out;
  std::string line;
  std::string section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number) + ": ";
    std::string_view text = line;
    const auto hash = text.find('#');
    if (hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where + "malformed section header");
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (!section_keys().contains(section)) {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    if (section.empty()) {
      if (key != "preset") throw ConfigError(where + "unknown top-level key '" + key + "'");
      out.preset_ = value;
      continue;
    }
    check_key(section, key, where);
    out.set(section, key, value);
  }
  if (in.bad()) throw ConfigError(source + ": read failure");
  return out;
}

RawConfig RawConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void RawConfig::assign(const std::string& section, const std::string& key,
                       const std::string& value) {
  auto& values = sections_[section];
  for (const auto& [a, b] : alternatives()) {
    if (a.contains(key)) {
      for (const auto& k : b) values.erase(k);
    }
    if (b.contains(key)) {
      for (const auto& k : a) values.erase(k);
    }
  }
  values[key] = value;
}

void RawConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  check_key(section, key, "");
  if (section == "both") {
    assign("short", key, value);
    assign("long", key, value);
    return;
  }
  assign(section, key, value);
}

void RawConfig::set_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("override '" + std::string(assignment) + "' is not section.key=value");
  }
  const std::string section(trim(assignment.substr(0, dot)));
  const std::string key(trim(assignment.substr(dot + 1, eq - dot - 1)));
  const std::string value(trim(assignment.substr(eq + 1)));
  if (value.empty()) throw ConfigError("override '" + std::string(assignment) + "' has no value");
  set(section, key, value);
}

void RawConfig::overlay(const RawConfig& top) {
  if (top.preset_) preset_ = top.preset_;
  for (const auto& [section, values] : top.sections_) {
    for (const auto& [key, value] : values) assign(section, key, value);
  }
}

ScenarioConfig resolve_config(const RawConfig& raw) {
  ScenarioConfig c;
  if (raw.preset()) c.preset = *raw.preset();
  c.short_arm = resolve_arm(raw, "short");
  c.long_arm = resolve_arm(raw, "long");

  const SectionReader grid(raw, "grid");
  double dt = c.short_arm.params.dt;
  double horizon = c.short_arm.params.t_horizon;
  grid.read("dt", parse_time, dt);
  grid.read("t_horizon", parse_time, horizon);
  for (ArmConfig* arm : {&c.short_arm, &c.long_arm}) {
    arm->params.dt = dt;
    arm->params.t_horizon = horizon;
  }
  grid.read("bin", parse_time, c.bin);
  if (auto w = grid.get("windows", [](std::string_view t) { return parse_list(t, parse_time); })) {
    c.windows = *w;
  }

  const SectionReader imp(raw, "imperfections");
  ImperfectionParams& ip = c.imperfections;
  imp.read("epsilon", parse_number, ip.epsilon);
  imp.read("omega_offset", parse_frequency, ip.omega_offset);
  imp.read("tau_gen", parse_time, ip.tau_gen);
  imp.read("background", [](std::string_view t) { return optional_unit(t, {"1/us", "/us"}); },
           ip.background_density);
  if (imp.has("sigma_drift") && (imp.has("sqrt_v") || imp.has("t_bar"))) {
    throw ConfigError("[imperfections] give either sigma_drift or sqrt_v with t_bar, not both");
  }
  imp.read("sigma_drift", [](std::string_view t) { return optional_unit(t, {"rad/us^2"}); },
           ip.sigma_drift);
  if (imp.has("sqrt_v") != imp.has("t_bar")) {
    throw ConfigError("[imperfections] sqrt_v and t_bar must be given together");
  }
  if (imp.has("sqrt_v")) {
    c.sqrt_v = imp.get("sqrt_v", parse_frequency);
    c.t_bar = imp.get("t_bar", parse_time);
    ip.sigma_drift = drift_sigma(*c.sqrt_v, *c.t_bar);
  }

  const SectionReader timing(raw, "timing");
  timing.read("trigger_period", parse_time, c.timing.trigger_period);
  timing.read("delay_line", parse_time, c.timing.delay_line);
  timing.read("async_start", parse_time, c.timing.async_start);
  timing.read("t_wait", parse_time, c.timing.t_wait);
  if (auto t = timing.get("first_trigger", parse_time)) {
    if (!(*t >= 0.0)) throw ConfigError("[timing] first_trigger must be >= 0");
    c.timing.first_trigger_ps =
        static_cast<std::uint64_t>(std::llround(*t * units::kPicosecondsPerMicrosecond));
  }
  timing.read("trials", parse_count, c.trials);
  timing.read("seed", parse_count, c.seed);

  const SectionReader sweep(raw, "sweep");
  if (auto w = sweep.get("omega", [](std::string_view t) { return parse_list(t, parse_frequency); })) {
    c.sweep.omegas = *w;
  }
  if (auto w = sweep.get("windows", [](std::string_view t) { return parse_list(t, parse_time); })) {
    c.sweep.windows = *w;
  }
  sweep.read("window_max", parse_time, c.sweep.window_max);
  if (auto o = sweep.get("objective", [](std::string_view t) { return parse_objective(std::string(trim(t))); })) {
    c.sweep.objective = *o;
  }
  sweep.read("threshold", parse_number, c.sweep.threshold);
  sweep.read("refine", parse_bool, c.sweep.refine);
  if (auto n = sweep.get("refine_iterations", parse_count)) c.sweep.refine_iterations = *n;

  const SectionReader output(raw, "output");
  if (auto d = output.get("dir", [](std::string_view t) { return std::string(trim(t)); })) {
    c.output_dir = *d;
  }
  if (auto n = output.get("kernel_stride", parse_count)) {
    c.kernel_stride = std::max<std::size_t>(1, *n);
  }

  c.short_arm.params.validate();
  c.long_arm.params.validate();
  c.imperfections.validate();
  if (!(c.bin > 0.0)) throw ConfigError("[grid] bin must be > 0");
  return c;
}

RawConfig load_preset(const std::string& name, const std::filesystem::path& preset_dir) {
  std::vector<std::string> chain;
  std::vector<RawConfig> layers;
  std::string current = name;
  while (true) {
    if (std::find(chain.begin(), chain.end(), current) != chain.end()) {
      throw ConfigError("preset inheritance cycle through '" + current + "'");
    }
    chain.push_back(current);
    const auto path = preset_dir / (current + ".cfg");
    if (!std::filesystem::exists(path)) {
      throw ConfigError("unknown preset '" + current + "' (no " + path.string() + ")");
    }
    layers.push_back(RawConfig::parse_file(path));
    if (!layers.back().preset()) break;
    current = *layers.back().preset();
  }
  RawConfig out;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) out.overlay(*it);
  out.set_preset(name);
  return out;
}

ScenarioConfig load_scenario(const LoadOptions& options) {
  RawConfig raw;
  if (options.preset) raw = load_preset(*options.preset, options.preset_dir);
  for (const auto& path : options.config_files) {
    RawConfig file = RawConfig::parse_file(path);
    if (file.preset()) raw.overlay(load_preset(*file.preset(), options.preset_dir));
    raw.overlay(file);
  }
  for (const auto& o : options.overrides) raw.set_override(o);
  return resolve_config(raw);
}

std::string echo_config(const ScenarioConfig& c) {
  std::ostringstream out;
  write_arm(out, "short", c.short_arm);
  write_arm(out, "long", c.long_arm);
  out << "[grid]\n";
  out << "dt = " << fmt(c.short_arm.params.dt) << " us\n";
  out << "t_horizon = " << fmt(c.short_arm.params.t_horizon) << " us\n";
  out << "bin = " << fmt(c.bin) << " us\n";
  if (!c.windows.empty()) out << "windows = " << join(c.windows, "us") << '\n';
  const ImperfectionParams& ip = c.imperfections;
  out << "[imperfections]\n";
  out << "epsilon = " << fmt(ip.epsilon) << '\n';
  out << "omega_offset = " << fmt(ip.omega_offset) << " rad/us\n";
  if (c.sqrt_v && c.t_bar) {
    out << "sqrt_v = " << fmt(*c.sqrt_v) << " rad/us\n";
    out << "t_bar = " << fmt(*c.t_bar) << " us\n";
  } else {
    out << "sigma_drift = " << fmt(ip.sigma_drift) << " rad/us^2\n";
  }
  out << "tau_gen = " << fmt(ip.tau_gen) << " us\n";
  out << "background = " << fmt(ip.background_density) << " 1/us\n";
  out << "[timing]\n";
  out << "trigger_period = " << fmt(c.timing.trigger_period) << " us\n";
  out << "delay_line = " << fmt(c.timing.delay_line) << " us\n";
  out << "async_start = " << fmt(c.timing.async_start) << " us\n";
  out << "t_wait = " << fmt(c.timing.t_wait) << " us\n";
  out << "first_trigger = " << c.timing.first_trigger_ps << " ps\n";
  out << "trials = " << c.trials << '\n';
  out << "seed = " << c.seed << '\n';
  out << "[sweep]\n";
  if (!c.sweep.omegas.empty()) out << "omega = " << join(c.sweep.omegas, "rad/us") << '\n';
  if (!c.sweep.windows.empty()) out << "windows = " << join(c.sweep.windows, "us") << '\n';
  out << "window_max = " << fmt(c.sweep.window_max) << " us\n";
  out << "objective = " << objective_name(c.sweep.objective) << '\n';
  out << "threshold = " << fmt(c.sweep.threshold) << '\n';
  out << "refine = " << (c.sweep.refine ? "true" : "false") << '\n';
  out << "refine_iterations = " << c.sweep.refine_iterations << '\n';
  out << "[output]\n";
  out << "dir = " << c.output_dir << '\n';
  out << "kernel_stride = " << c.kernel_stride << '\n';
  return out.str();
}

PhotonRecord build_arm_record(const ArmConfig& arm, const SourceOptions& options) {
  PhotonRecord unit = make_photon_record(arm.params, 1.0, options);
  double eta = arm.eta.value_or(1.0);
  if (arm.detect_prob) eta = efficiency_for_detection(unit, *arm.detect_prob);
  return with_efficiency(std::move(unit), eta);
}

std::vector<double> scenario_windows(const ScenarioConfig& config) {
  if (!config.windows.empty()) return config.windows;
  return window_ladder(config.bin, config.short_arm.params.t_horizon);
}

SweepSpec make_sweep_spec(const ScenarioConfig& config, double eta_short, double eta_long) {
  SweepSpec spec;
  spec.short_arm = config.short_arm.params;
  spec.long_arm = config.long_arm.params;
  spec.eta_short = eta_short;
  spec.eta_long = eta_long;
  spec.imperfections = config.imperfections;
  spec.bin_width = config.bin;
  spec.omega_values = config.sweep.omegas;
  if (spec.omega_values.empty()) spec.omega_values = {config.short_arm.params.omega_drive};
  if (!config.sweep.windows.empty()) {
    spec.window_values = config.sweep.windows;
  } else {
    const double max = config.sweep.window_max > 0.0 ? config.sweep.window_max
                                                     : config.short_arm.params.t_horizon;
    spec.window_values = window_ladder(config.bin, max);
  }
  spec.objective = config.sweep.objective;
  spec.refine = config.sweep.refine;
  spec.refine_iterations = config.sweep.refine_iterations;
  return spec;
}

}  // namespace homsim
