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

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "homsim/csv.hpp"
#include "homsim/error.hpp"

namespace {

std::filesystem::path default_preset_dir(const char* argv0) {
  if (const char* env = std::getenv("HOMSIM_PRESET_DIR")) return env;
  const std::filesystem::path built_in = HOMSIM_DEFAULT_PRESET_DIR;
  if (std::filesystem::exists(built_in)) return built_in;
  std::error_code ec;
  const auto exe = std::filesystem::canonical(argv0, ec);
  if (!ec) {
    const auto installed = exe.parent_path().parent_path() / "share" / "homsim" / "presets";
    if (std::filesystem::exists(installed)) return installed;
  }
  return built_in;
}

void add_common(CLI::App* cmd, homsim::cli::CommonOptions& o) {
  cmd->add_option("--preset", o.preset, "Preset name (fig2_basic, fig2_extended, fig3_extended, figA5)");
  cmd->add_option("--config", o.config, "Scenario config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override, section.key=value (repeatable)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--preset-dir", o.preset_dir, "Directory holding preset files");
  cmd->add_flag("--strict", o.strict, "Treat grid and truncation warnings as errors");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace homsim::cli;
  CLI::App app{"Two-photon interference simulator and time-tag analysis"};
  app.set_version_flag("--version", homsim::version());
  app.require_subcommand(1);

  CommonOptions common;
  common.preset_dir = default_preset_dir(argv[0]);
  SweepOptions sweep;
  AnalyzeOptions analyze;
  EstimateOptions estimate;
  SampleOptions sample;

  auto* sim_cmd = app.add_subcommand("simulate", "Singles, coincidence and visibility curves");
  add_common(sim_cmd, common);

  auto* sweep_cmd = app.add_subcommand("sweep", "Visibility/success frontier over the drive strength");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--sweep", sweep.sweep_file, "Sweep config file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threshold", sweep.threshold, "Constraint threshold of the objective");
  sweep_cmd->add_flag("--refine", sweep.refine, "Golden-section refinement of the optimum");

  auto* analyze_cmd = app.add_subcommand("analyze", "Histograms and visibility from a time-tag file");
  add_common(analyze_cmd, common);
  analyze_cmd->add_option("--input", analyze.input, "Time-tag CSV")->required();
  analyze_cmd->add_option("--subtract-dark", analyze.dark_rate, "Dark-count rate per detector (1/s)");
  analyze_cmd->add_option("--shards", analyze.shards, "Trigger shards merged after histogramming")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--gate-length", analyze.gate_length, "Gate window length (us)");

  auto* est_cmd = app.add_subcommand("estimate", "Remote-entanglement fidelity and swap rate");
  est_cmd->add_option("--v", estimate.v, "Visibility V(T)")->required();
  est_cmd->add_option("--rgen", estimate.r_gen, "Attempt rate (1/s)")->required();
  est_cmd->add_option("--cperp", estimate.c_perp, "Coincidence probability C_perp(T)")->required();
  est_cmd->add_option("--fiber-km", estimate.fiber_km, "Extra fiber length (km)");
  est_cmd->add_option("--atten", estimate.atten_db_per_km, "Fiber loss (dB/km)");
  est_cmd->add_option("--dark-rate", estimate.dark_rate, "Dark coincidence rate (1/s)");
  est_cmd->add_option("--proportionality", estimate.proportionality, "Rate proportionality constant");
  est_cmd->add_option("--arms", estimate.arms, "Photon arms through the fiber (0, 1 or 2)");
  est_cmd->add_option("--out", estimate.out, "Also write the report to this file");

  auto* sample_cmd = app.add_subcommand("sample", "Synthetic time-tag stream from the model");
  add_common(sample_cmd, common);
  sample_cmd->add_option("--trials", sample.trials, "Number of trials");
  sample_cmd->add_option("--seed", sample.seed, "Random seed");
  sample_cmd->add_option("--output", sample.output, "Time-tag CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim_cmd) return run_simulate(common);
    if (*sweep_cmd) return run_sweep(common, sweep);
    if (*analyze_cmd) return run_analyze(common, analyze);
    if (*est_cmd) return run_estimate(estimate);
    if (*sample_cmd) return run_sample(common, sample);
  } catch (const homsim::Error& e) {
    std::cerr << "homsim: error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "homsim: error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "homsim: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
