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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homsim/hom.hpp"
#include "homsim/photon_source.hpp"
#include "homsim/source_params.hpp"
#include "homsim/sweep.hpp"
#include "homsim/timetag.hpp"

namespace homsim {

/// Frequency with a unit suffix (MHz, kHz, Hz, GHz, rad/us) to rad/us.
/// Ordinary frequencies map to omega = 2 pi nu.
double parse_frequency(std::string_view text);
/// Time with a unit suffix (us, ns, ps, ms, s) to us.
double parse_time(std::string_view text);
/// Plain number or fraction "a/b" without a unit.
double parse_number(std::string_view text);

/// One photon source arm. Exactly one of `eta` and `detect_prob` sets the
/// detection efficiency; with neither, eta = 1.
struct ArmConfig {
  SourceParams params;
  std::optional<double> eta;
  /// Detected photon probability per trial; eta = detect_prob / (1 - P0).
  std::optional<double> detect_prob;

  bool operator==(const ArmConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> omegas;
  /// Explicit windows; empty means bin, 2 bin, ... up to window_max.
  std::vector<double> windows;
  /// 0 means the time horizon.
  double window_max = 0.0;
  Objective objective = Objective::kMaxPsuccAtV;
  double threshold = 0.99;
  bool refine = false;
  std::size_t refine_iterations = 12;

  bool operator==(const SweepConfig&) const = default;
};

struct ScenarioConfig {
  /// Name of the outermost preset in the inheritance chain, if any.
  std::string preset;
  ArmConfig short_arm;
  ArmConfig long_arm;
  ImperfectionParams imperfections;
  /// Drift given as sqrt(v) accumulated over t_bar (sigma = sqrt_v / t_bar).
  std::optional<double> sqrt_v;
  std::optional<double> t_bar;
  double bin = 0.125;
  /// Visibility windows; empty means bin, 2 bin, ... up to the horizon.
  std::vector<double> windows;
  SyntheticTiming timing;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  SweepConfig sweep;
  std::string output_dir = "out";
  std::size_t kernel_stride = 10;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Section -> key -> value text, before unit resolution.
class RawConfig {
 public:
  /// Parses INI-like text: `[section]` headers, `key = value` lines, '#'
  /// comments. Unknown sections or keys raise ConfigError with the line.
  static RawConfig parse(std::istream& in, const std::string& source);
  static RawConfig parse_file(const std::filesystem::path& path);

  /// Assigns `section.key = value`. Keys of the pseudo-section `both` go to
  /// the short and long arms. Setting one member of a group of alternatives
  /// (g vs g0/alpha/beta, eta vs detect_prob, sigma_drift vs sqrt_v/t_bar)
  /// clears the others.
  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Applies `section.key=value`.
  void set_override(std::string_view assignment);
  /// Layers `top` over this configuration.
  void overlay(const RawConfig& top);

  const std::optional<std::string>& preset() const { return preset_; }
  void set_preset(std::string name) { preset_ = std::move(name); }
  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  void assign(const std::string& section, const std::string& key, const std::string& value);

  std::optional<std::string> preset_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

ScenarioConfig resolve_config(const RawConfig& raw);

struct LoadOptions {
  std::optional<std::string> preset;
  /// Config files layered in order.
  std::vector<std::filesystem::path> config_files;
  std::vector<std::string> overrides;
  std::filesystem::path preset_dir;
};

/// Preset chain, then each config file (after its own preset chain), then
/// overrides.
ScenarioConfig load_scenario(const LoadOptions& options);

/// Loads `<preset_dir>/<name>.cfg` with its inherited presets.
RawConfig load_preset(const std::string& name, const std::filesystem::path& preset_dir);

/// Config text that resolves to `config` exactly: frequencies in rad/us,
/// times in us, printed with 17 significant digits.
std::string echo_config(const ScenarioConfig& config);

/// Record of one arm with its efficiency applied.
PhotonRecord build_arm_record(const ArmConfig& arm, const SourceOptions& options = {});

/// The visibility windows of the scenario.
std::vector<double> scenario_windows(const ScenarioConfig& config);

/// Sweep over the configured omegas. The efficiencies are given explicitly
/// (resolved once at the configured drive).
SweepSpec make_sweep_spec(const ScenarioConfig& config, double eta_short, double eta_long);

}  // namespace homsim
