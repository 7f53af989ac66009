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

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "homsim/config.hpp"
#include "homsim/error.hpp"

namespace homsim {
namespace {

using units::khz;
using units::mhz;

RawConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return RawConfig::parse(in, "inline.cfg");
}

std::string config_error(const std::string& text) {
  try {
    resolve_config(parse_text(text));
  } catch (const Error& e) {
    EXPECT_EQ(e.exit_code(), 2) << e.what();
    return e.what();
  }
  return {};
}

/// Scratch preset directory removed on destruction.
struct ScratchDir {
  std::filesystem::path path;
  explicit ScratchDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("homsim_" + name + "_" + std::to_string(std::random_device{}()))) {
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() { std::filesystem::remove_all(path); }
  void write(const std::string& file, const std::string& text) const { std::ofstream(path / file) << text; }
};

TEST(Units, Frequencies) {
  EXPECT_DOUBLE_EQ(parse_frequency("63.5 MHz"), mhz(63.5));
  EXPECT_DOUBLE_EQ(parse_frequency("-403MHz"), -mhz(403.0));
  EXPECT_DOUBLE_EQ(parse_frequency("40 kHz"), khz(40.0));
  EXPECT_DOUBLE_EQ(parse_frequency("2 GHz"), mhz(2000.0));
  EXPECT_DOUBLE_EQ(parse_frequency("1e6 Hz"), mhz(1.0));
  EXPECT_DOUBLE_EQ(parse_frequency("12.5 rad/us"), 12.5);
  EXPECT_THROW(parse_frequency("63.5"), ConfigError);
  EXPECT_THROW(parse_frequency("63.5 us"), ConfigError);
  EXPECT_THROW(parse_frequency("fast MHz"), ConfigError);
}

TEST(Units, Times) {
  EXPECT_DOUBLE_EQ(parse_time("5 ns"), 0.005);
  EXPECT_DOUBLE_EQ(parse_time("9.4 us"), 9.4);
  EXPECT_DOUBLE_EQ(parse_time("250 ps"), 250e-6);
  EXPECT_DOUBLE_EQ(parse_time("2 ms"), 2000.0);
  EXPECT_DOUBLE_EQ(parse_time("1 s"), 1e6);
  EXPECT_THROW(parse_time("17"), ConfigError);
  EXPECT_THROW(parse_time("17 MHz"), ConfigError);
}

TEST(Units, Numbers) {
  EXPECT_DOUBLE_EQ(parse_number("4/15"), 4.0 / 15.0);
  EXPECT_DOUBLE_EQ(parse_number(" 0.75 "), 0.75);
  EXPECT_THROW(parse_number("1/0"), ConfigError);
  EXPECT_THROW(parse_number("3 MHz"), ConfigError);
  EXPECT_THROW(parse_number(""), ConfigError);
}

TEST(Parse, UnknownNamesCarryLocation) {
  EXPECT_NE(config_error("[grid]\ndt = 5 ns\n[cavity]\n").find("inline.cfg:3: unknown section [cavity]"),
            std::string::npos);
  EXPECT_NE(config_error("[short]\nomega = 1 MHz\ncolour = red\n").find("inline.cfg:3"), std::string::npos);
  EXPECT_NE(config_error("dt = 5 ns\n").find("inline.cfg:1: unknown top-level key"), std::string::npos);
  EXPECT_NE(config_error("[grid]\ndt 5 ns\n").find("inline.cfg:2"), std::string::npos);
  EXPECT_NE(config_error("[grid\n").find("inline.cfg:1: malformed"), std::string::npos);
  EXPECT_NE(config_error("[grid]\ndt =\n").find("inline.cfg:2: empty"), std::string::npos);
}

TEST(Parse, ValueErrorsAreConfigErrors) {
  EXPECT_FALSE(config_error("[short]\nkappa = 0.07\n").empty());
  EXPECT_FALSE(config_error("[short]\nkappa = -0.07 MHz\n").empty());
  EXPECT_FALSE(config_error("[imperfections]\nsqrt_v = 50 kHz\n").empty());
  EXPECT_FALSE(config_error("[imperfections]\nepsilon = 2\n").empty());
  EXPECT_FALSE(config_error("[sweep]\nobjective = fastest\n").empty());
  EXPECT_FALSE(config_error("[grid]\ndt = 7 ns\n[both]\npulse_off = 9.4 us\n").empty());
  EXPECT_FALSE(config_error("[both]\ng0 = 1 MHz\nalpha = 1\n").empty());
}

TEST(Parse, BothSectionAndAlternatives) {
  RawConfig raw = parse_text("[both]\nkappa = 0.1 MHz\ng = 1 MHz\n[short]\nalpha = 0.5\ng0 = 2 MHz\nbeta = 0.5\n");
  const auto& s = raw.sections();
  EXPECT_EQ(s.at("short").at("kappa"), "0.1 MHz");
  EXPECT_EQ(s.at("long").at("kappa"), "0.1 MHz");
  EXPECT_FALSE(s.at("short").contains("g"));
  EXPECT_TRUE(s.at("long").contains("g"));
  const ScenarioConfig c = resolve_config(raw);
  EXPECT_DOUBLE_EQ(c.short_arm.params.g_eff, 0.5 * 0.5 * mhz(2.0));
  EXPECT_DOUBLE_EQ(c.long_arm.params.g_eff, mhz(1.0));

  raw.set_override("short.beta_sq=1/4");
  EXPECT_FALSE(raw.sections().at("short").contains("beta"));
  raw.set_override("long.detect_prob = 0.1");
  raw.set_override("long.eta=0.5");
  EXPECT_FALSE(raw.sections().at("long").contains("detect_prob"));
  raw.set_override("imperfections.sqrt_v=50 kHz");
  raw.set_override("imperfections.t_bar=10 us");
  raw.set_override("imperfections.sigma_drift=3");
  EXPECT_FALSE(raw.sections().at("imperfections").contains("sqrt_v"));
  EXPECT_THROW(raw.set_override("kappa=1 MHz"), ConfigError);
  EXPECT_THROW(raw.set_override("short.kappa="), ConfigError);
  EXPECT_THROW(raw.set_override("short.colour=red"), ConfigError);
}

TEST(Parse, ListsTakeTheFinalUnit) {
  const ScenarioConfig c = resolve_config(parse_text("[grid]\nwindows = 0.125, 250 ns, 9 us\n[sweep]\nomega = 20, 40 MHz\n"));
  ASSERT_EQ(c.windows.size(), 3u);
  EXPECT_DOUBLE_EQ(c.windows[0], 0.125);
  EXPECT_DOUBLE_EQ(c.windows[1], 0.25);
  EXPECT_DOUBLE_EQ(c.windows[2], 9.0);
  EXPECT_DOUBLE_EQ(c.sweep.omegas[1], mhz(40.0));
}

TEST(Presets, DelayLineBasic) {
  const ScenarioConfig c = test::preset("fig2_basic");
  EXPECT_EQ(c.preset, "fig2_basic");
  const SourceParams expected_short = test::delay_line_source(4.0 / 15.0);
  const SourceParams& s = c.short_arm.params;
  EXPECT_DOUBLE_EQ(s.omega_drive, expected_short.omega_drive);
  EXPECT_DOUBLE_EQ(s.delta, expected_short.delta);
  EXPECT_FALSE(s.delta_stark.has_value());
  EXPECT_DOUBLE_EQ(s.g_eff, expected_short.g_eff);
  EXPECT_DOUBLE_EQ(s.kappa, expected_short.kappa);
  EXPECT_DOUBLE_EQ(s.gamma_sp, expected_short.gamma_sp);
  EXPECT_DOUBLE_EQ(s.gamma_dp, expected_short.gamma_dp);
  EXPECT_DOUBLE_EQ(s.pulse_off, 9.4);
  EXPECT_DOUBLE_EQ(s.t_horizon, 17.0);
  EXPECT_DOUBLE_EQ(s.dt, 0.005);
  EXPECT_DOUBLE_EQ(c.long_arm.params.g_eff, test::delay_line_source(1.0 / 3.0).g_eff);
  EXPECT_DOUBLE_EQ(*c.short_arm.detect_prob, 0.124);
  EXPECT_DOUBLE_EQ(*c.long_arm.detect_prob, 0.027);
  EXPECT_EQ(c.imperfections.epsilon, 0.0);
  EXPECT_DOUBLE_EQ(c.imperfections.tau_gen, 13.35);
  EXPECT_DOUBLE_EQ(c.bin, 0.125);
}

TEST(Presets, ExtendedInheritsAndAdds) {
  const ScenarioConfig basic = test::preset("fig2_basic");
  const ScenarioConfig ext = test::preset("fig2_extended");
  EXPECT_EQ(ext.short_arm, basic.short_arm);
  EXPECT_EQ(ext.long_arm, basic.long_arm);
  EXPECT_DOUBLE_EQ(ext.imperfections.epsilon, 0.01);
  EXPECT_DOUBLE_EQ(ext.imperfections.omega_offset, khz(40.0));
  EXPECT_EQ(ext.output_dir, "out/fig2_extended");
}

TEST(Presets, ConvertedExperiment) {
  const ScenarioConfig c = test::preset("fig3_extended");
  EXPECT_DOUBLE_EQ(c.short_arm.params.omega_drive, mhz(64.3));
  EXPECT_DOUBLE_EQ(c.short_arm.params.g_eff, 0.69 * std::sqrt(4.0 / 15.0) * mhz(1.53));
  EXPECT_DOUBLE_EQ(c.imperfections.sigma_drift, khz(50.0) / 10.0);
  EXPECT_DOUBLE_EQ(c.imperfections.background_density, 0.8e-6);
  EXPECT_DOUBLE_EQ(*c.long_arm.detect_prob, 0.005);
  EXPECT_EQ(c.imperfections.epsilon, 0.0);
}

TEST(Presets, DriveSweep) {
  const ScenarioConfig c = test::preset("figA5");
  EXPECT_EQ(c.short_arm, c.long_arm);
  EXPECT_DOUBLE_EQ(c.short_arm.params.gamma_dp, mhz(0.7));
  EXPECT_DOUBLE_EQ(c.short_arm.params.pulse_off, 20.0);
  ASSERT_EQ(c.sweep.omegas.size(), 6u);
  EXPECT_DOUBLE_EQ(c.sweep.omegas[2], mhz(40.0));
  EXPECT_EQ(c.sweep.objective, Objective::kMaxPsuccAtV);
  EXPECT_DOUBLE_EQ(c.sweep.threshold, 0.99);
  const SweepSpec spec = make_sweep_spec(c, 1.0, 1.0);
  EXPECT_EQ(spec.window_values.size(), 160u);
  EXPECT_EQ(spec.omega_values, c.sweep.omegas);
}

TEST(Presets, EchoRoundTrip) {
  for (const char* name : {"fig2_basic", "fig2_extended", "fig3_extended", "figA5"}) {
    ScenarioConfig c = test::preset(name);
    const std::string text = echo_config(c);
    const ScenarioConfig again = resolve_config(parse_text(text));
    c.preset.clear();
    EXPECT_EQ(again, c) << name;
    EXPECT_EQ(echo_config(again), text) << name;
  }
}

TEST(Presets, ChainsAndErrors) {
  ScratchDir dir("presets");
  dir.write("a.cfg", "preset = b\n[grid]\nbin = 250 ns\n");
  dir.write("b.cfg", "preset = a\n");
  dir.write("c.cfg", "preset = missing\n");
  dir.write("d.cfg", "preset = e\n[both]\nomega = 10 MHz\n");
  dir.write("e.cfg", "[both]\nomega = 5 MHz\nkappa = 0.1 MHz\n");
  EXPECT_THROW(load_preset("a", dir.path), ConfigError);
  EXPECT_THROW(load_preset("c", dir.path), ConfigError);
  EXPECT_THROW(load_preset("nope", dir.path), ConfigError);
  const RawConfig d = load_preset("d", dir.path);
  EXPECT_EQ(d.sections().at("short").at("omega"), "10 MHz");
  EXPECT_EQ(d.sections().at("long").at("kappa"), "0.1 MHz");
  EXPECT_EQ(*d.preset(), "d");
}

TEST(Load, FilesThenOverrides) {
  ScratchDir dir("load");
  dir.write("run.cfg", "preset = fig2_basic\n[short]\neta = 0.5\n[grid]\nbin = 250 ns\n");
  LoadOptions o;
  o.preset_dir = test::preset_dir();
  o.config_files = {dir.path / "run.cfg"};
  o.overrides = {"grid.bin=500 ns", "timing.seed=9"};
  const ScenarioConfig c = load_scenario(o);
  EXPECT_DOUBLE_EQ(*c.short_arm.eta, 0.5);
  EXPECT_FALSE(c.short_arm.detect_prob.has_value());
  EXPECT_DOUBLE_EQ(*c.long_arm.detect_prob, 0.027);
  EXPECT_DOUBLE_EQ(c.bin, 0.5);
  EXPECT_EQ(c.seed, 9u);
  o.config_files = {dir.path / "absent.cfg"};
  EXPECT_THROW(load_scenario(o), ConfigError);
}

TEST(Scenario, WindowsAndArmRecords) {
  ScenarioConfig c = test::preset("fig2_basic");
  const auto w = scenario_windows(c);
  EXPECT_EQ(w.size(), 136u);
  EXPECT_DOUBLE_EQ(w.front(), 0.125);
  c.windows = {0.25, 9.0};
  EXPECT_EQ(scenario_windows(c), c.windows);

  ArmConfig arm = c.long_arm;
  arm.params = test::coarse(arm.params, 0.02, 17.0);
  const PhotonRecord r = build_arm_record(arm);
  EXPECT_NEAR(r.detection_probability(), 0.027, 1e-15);
  arm.detect_prob.reset();
  arm.eta = 0.25;
  EXPECT_DOUBLE_EQ(build_arm_record(arm).eta, 0.25);
  arm.eta.reset();
  EXPECT_DOUBLE_EQ(build_arm_record(arm).eta, 1.0);
}

}  // namespace
}  // namespace homsim
