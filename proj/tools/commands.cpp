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

#include "commands.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homsim/config.hpp"
#include "homsim/csv.hpp"
#include "homsim/error.hpp"
#include "homsim/hom.hpp"
#include "homsim/netlink.hpp"
#include "homsim/photon_source.hpp"
#include "homsim/sweep.hpp"
#include "homsim/timetag.hpp"
#include "homsim/units.hpp"

namespace homsim::cli {
namespace {

namespace fs = std::filesystem;

ScenarioConfig load(const CommonOptions& common,
                    const std::optional<fs::path>& extra = std::nullopt) {
  LoadOptions options;
  options.preset = common.preset;
  if (common.config) options.config_files.push_back(*common.config);
  if (extra) options.config_files.push_back(*extra);
  options.overrides = common.overrides;
  options.preset_dir = common.preset_dir;
  return load_scenario(options);
}

fs::path output_dir(const CommonOptions& common, const ScenarioConfig& cfg) {
  return common.out ? *common.out : fs::path(cfg.output_dir);
}

/// Writes through a temporary file so a failure never leaves a truncated
/// artifact behind.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<std::pair<std::string, std::string>> model_flags(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> flags;
  if (cfg.sqrt_v) {
    flags.emplace_back("drift", "sqrt_v is the rms frequency deviation over t_bar; sigma = sqrt_v / t_bar");
  }
  flags.emplace_back("background", "added to both the parallel and the perpendicular density");
  flags.emplace_back("tau", "t(D2) - t(D1); bins [k w, (k + 1) w)");
  for (const auto* arm : {&cfg.short_arm, &cfg.long_arm}) {
    const char* name = arm == &cfg.short_arm ? "eta_short" : "eta_long";
    flags.emplace_back(name, arm->detect_prob ? "detect_prob / (1 - P0)" : "given");
  }
  return flags;
}

Metadata metadata(const std::string& command, const ScenarioConfig& cfg) {
  Metadata meta;
  meta.command = command;
  meta.flags = model_flags(cfg);
  meta.config = echo_config(cfg);
  return meta;
}

void report_warnings(const PhotonRecord& rec, const char* arm) {
  for (const auto& w : rec.warnings) std::cerr << "homsim: warning (" << arm << " arm): " << w << '\n';
}

struct Records {
  PhotonRecord a;
  std::optional<PhotonRecord> b_own;
  const PhotonRecord& b() const { return b_own ? *b_own : a; }
};

Records build_records(const ScenarioConfig& cfg, bool strict) {
  SourceOptions so;
  so.strict = strict;
  Records r{build_arm_record(cfg.short_arm, so), std::nullopt};
  report_warnings(r.a, "short");
  if (!(cfg.short_arm == cfg.long_arm)) {
    r.b_own = build_arm_record(cfg.long_arm, so);
    report_warnings(*r.b_own, "long");
  }
  return r;
}

nlohmann::ordered_json arm_summary(const PhotonRecord& rec) {
  nlohmann::ordered_json j;
  const ScatterCount count = expected_scatter_count(rec);
  j["eta"] = rec.eta;
  j["p0"] = rec.p0;
  j["p0_direct"] = rec.p0_direct;
  j["emission_probability"] = rec.emission_probability();
  j["detection_probability"] = rec.detection_probability();
  j["scatter_count_per_run"] = count.unconditional;
  if (count.conditional_on_emission) {
    j["scatter_count_given_emission"] = *count.conditional_on_emission;
  } else {
    j["scatter_count_given_emission"] = nullptr;
  }
  j["warnings"] = rec.warnings;
  return j;
}

double eta_of(const ArmConfig& arm, bool strict) {
  if (!arm.detect_prob) return arm.eta.value_or(1.0);
  SourceOptions so;
  so.strict = strict;
  return efficiency_for_detection(make_photon_record(arm.params, 1.0, so), *arm.detect_prob);
}

}  // namespace

int run_simulate(const CommonOptions& common) {
  const ScenarioConfig cfg = load(common);
  const Records rec = build_records(cfg, common.strict);
  const std::vector<double> windows = scenario_windows(cfg);
  const CoincidenceResult result =
      compute_coincidences(rec.a, rec.b(), cfg.imperfections, cfg.bin, windows);
  const auto ps_a = single_click_density(rec.a);
  const auto ps_b = single_click_density(rec.b());
  const Metadata meta = metadata("simulate", cfg);
  const fs::path dir = output_dir(common, cfg);

  nlohmann::ordered_json summary;
  summary["version"] = version();
  summary["short"] = arm_summary(rec.a);
  summary["long"] = arm_summary(rec.b());

  write_file(dir / "singles.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    out << std::setprecision(12) << "t_us,p_s_short_per_us,p_s_long_per_us\n";
    for (std::size_t k = 0; k < ps_a.size(); ++k) {
      out << rec.a.grid.at(k) << ',' << ps_a[k] << ',' << ps_b[k] << '\n';
    }
  });
  write_file(dir / "coincidences.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    write_coincidence_csv(out, result);
  });
  write_file(dir / "visibility.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    write_visibility_csv(out, result.curve);
  });
  write_file(dir / "summary.json", [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
  write_file(dir / "resolved.cfg", [&](std::ostream& out) { out << echo_config(cfg); });

  std::cout << std::setprecision(6);
  for (const auto& p : result.curve) {
    const double t = p.window;
    if (std::abs(t - 0.125) < 1e-12 || std::abs(t - 0.25) < 1e-12 || std::abs(t - 9.0) < 1e-12) {
      std::cout << "T = " << t << " us: V = ";
      if (p.visibility) std::cout << *p.visibility;
      else std::cout << "undefined";
      std::cout << ", P_succ = " << p.p_succ << '\n';
    }
  }
  const ScatterCount count = expected_scatter_count(rec.a);
  std::cout << "scatter count (short arm): " << count.unconditional << " per run";
  if (count.conditional_on_emission) std::cout << ", " << *count.conditional_on_emission << " given emission";
  std::cout << "\noutputs written to " << dir.string() << '\n';
  return 0;
}

int run_sweep(const CommonOptions& common, const SweepOptions& options) {
  const ScenarioConfig cfg = load(common, options.sweep_file);
  SweepSpec spec = make_sweep_spec(cfg, eta_of(cfg.short_arm, common.strict),
                                   eta_of(cfg.long_arm, common.strict));
  spec.jobs = options.jobs;
  spec.refine = spec.refine || options.refine;
  spec.source_options.strict = common.strict;
  const double threshold = options.threshold.value_or(cfg.sweep.threshold);

  const auto rows = homsim::run_sweep(spec);
  const OptimumResult best = find_optimal_omega(spec, rows, threshold);
  const Metadata meta = metadata("sweep", cfg);
  const fs::path dir = output_dir(common, cfg);

  nlohmann::ordered_json j;
  j["objective"] = objective_name(spec.objective);
  j["threshold"] = threshold;
  j["feasible"] = best.feasible;
  if (best.feasible) {
    j["omega_over_2pi_MHz"] = units::to_mhz(best.omega);
    j["T_us"] = best.window;
    j["V"] = best.visibility;
    j["P_succ"] = best.p_succ;
    j["refined"] = best.refined;
  } else {
    j["reason"] = best.reason;
  }

  write_file(dir / "sweep.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    write_sweep_csv(out, rows);
  });
  write_file(dir / "optimum.json", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_analyze(const CommonOptions& common, const AnalyzeOptions& options) {
  const ScenarioConfig cfg = load(common);
  const TimeTagStream stream = parse_timetags_file(options.input);
  const double length = options.gate_length.value_or(cfg.short_arm.params.t_horizon +
                                                     cfg.short_arm.params.dt);
  const GateSpec gates = synthetic_gates(cfg.timing, length, cfg.bin);
  HistogramSet h = build_histograms(stream, gates, options.shards);
  if (options.dark_rate) subtract_dark(h, *options.dark_rate);
  const auto rows = experimental_visibility(h, scenario_windows(cfg));

  Metadata meta = metadata("analyze", cfg);
  meta.flags.emplace_back("input", options.input.string());
  if (options.dark_rate) {
    meta.flags.emplace_back("dark_subtraction", std::to_string(*options.dark_rate) + " 1/s per detector, singles only");
  }
  const fs::path dir = output_dir(common, cfg);
  write_file(dir / "histograms.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    write_histogram_csv(out, h);
  });
  write_file(dir / "singles_measured.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    write_singles_csv(out, h);
  });
  write_file(dir / "visibility_measured.csv", [&](std::ostream& out) {
    write_metadata(out, meta);
    write_experimental_visibility_csv(out, rows);
  });
  std::cout << "triggers: " << h.triggers << ", trials: " << h.trials
            << ", unassigned detector events: " << h.unassigned_events << '\n';
  std::cout << std::setprecision(6);
  for (const auto& r : rows) {
    if (std::abs(r.window - 0.125) < 1e-12 || std::abs(r.window - 9.0) < 1e-12) {
      std::cout << "T = " << r.window << " us: V = ";
      if (r.visibility) std::cout << *r.visibility << " +- " << *r.sigma;
      else std::cout << "undefined";
      std::cout << " (N_par = " << r.n_parallel << ", N_perp = " << r.n_perp << ")\n";
    }
  }
  return 0;
}

int run_estimate(const EstimateOptions& options) {
  LinkSpec spec;
  spec.v = options.v;
  spec.r_gen = options.r_gen;
  spec.c_perp = options.c_perp;
  spec.fiber_km = options.fiber_km;
  spec.atten_db_per_km = options.atten_db_per_km;
  spec.dark_rate = options.dark_rate;
  spec.proportionality = options.proportionality;
  spec.attenuated_arms = options.arms;
  const std::string text = to_json(swap_rate(spec));
  if (options.out) write_file(*options.out, [&](std::ostream& out) { out << text << '\n'; });
  std::cout << text << '\n';
  return 0;
}

int run_sample(const CommonOptions& common, const SampleOptions& options) {
  const ScenarioConfig cfg = load(common);
  const Records rec = build_records(cfg, common.strict);
  const std::uint64_t trials = options.trials.value_or(cfg.trials);
  const std::uint64_t seed = options.seed.value_or(cfg.seed);
  const TimeTagStream stream =
      sample_synthetic(rec.a, rec.b(), cfg.imperfections, trials, seed, cfg.timing);
  Metadata meta = metadata("sample", cfg);
  meta.flags.emplace_back("trials", std::to_string(trials));
  meta.flags.emplace_back("seed", std::to_string(seed));
  const fs::path path = options.output ? *options.output : output_dir(common, cfg) / "timetags.csv";
  write_file(path, [&](std::ostream& out) {
    write_metadata(out, meta);
    write_timetags(out, stream);
  });
  std::cout << "wrote " << stream.events.size() << " events (" << trials << " trials) to "
            << path.string() << '\n';
  return 0;
}

}  // namespace homsim::cli
