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
#include <optional>
#include <string>
#include <vector>

namespace homsim::cli {

struct CommonOptions {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> out;
  std::filesystem::path preset_dir;
  bool strict = false;
};

struct SweepOptions {
  std::optional<std::filesystem::path> sweep_file;
  std::size_t jobs = 1;
  std::optional<double> threshold;
  bool refine = false;
};

struct AnalyzeOptions {
  std::filesystem::path input;
  std::optional<double> dark_rate;
  std::size_t shards = 1;
  std::optional<double> gate_length;
};

struct EstimateOptions {
  double v = 0.0;
  double r_gen = 0.0;
  double c_perp = 0.0;
  double fiber_km = 0.0;
  double atten_db_per_km = 0.18;
  double dark_rate = 0.0;
  double proportionality = 1.0;
  int arms = 1;
  std::optional<std::filesystem::path> out;
};

struct SampleOptions {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

int run_simulate(const CommonOptions& common);
int run_sweep(const CommonOptions& common, const SweepOptions& options);
int run_analyze(const CommonOptions& common, const AnalyzeOptions& options);
int run_estimate(const EstimateOptions& options);
int run_sample(const CommonOptions& common, const SampleOptions& options);

}  // namespace homsim::cli
