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

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "homsim/config.hpp"
#include "homsim/hom.hpp"
#include "homsim/photon_source.hpp"
#include "homsim/timetag.hpp"

namespace {

using namespace homsim;

// Grid steps in ns, passed as the benchmark argument.
ScenarioConfig scenario(std::int64_t dt_ns) {
  LoadOptions o;
  o.preset = "fig2_extended";
  o.preset_dir = HOMSIM_BENCH_PRESET_DIR;
  o.overrides.push_back("grid.dt=" + std::to_string(dt_ns) + " ns");
  return load_scenario(o);
}

struct Arms {
  PhotonRecord a;
  PhotonRecord b;
  ImperfectionParams imp;
};

Arms arms(std::int64_t dt_ns) {
  const ScenarioConfig c = scenario(dt_ns);
  return {build_arm_record(c.short_arm), build_arm_record(c.long_arm), c.imperfections};
}

void BM_PhotonRecord(benchmark::State& state) {
  const ScenarioConfig c = scenario(state.range(0));
  for (auto _ : state) {
    PhotonRecord r = build_arm_record(c.short_arm);
    benchmark::DoNotOptimize(r.kernel.data());
  }
  state.counters["grid"] = static_cast<double>(c.short_arm.params.grid().size);
}
BENCHMARK(BM_PhotonRecord)->Arg(40)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Coincidences(benchmark::State& state) {
  const Arms x = arms(state.range(0));
  const auto windows = window_ladder(0.125, 9.0);
  for (auto _ : state) {
    const auto r = compute_coincidences(x.a, x.b, x.imp, 0.125, windows);
    benchmark::DoNotOptimize(r.curve.data());
  }
}
BENCHMARK(BM_Coincidences)->Arg(40)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SampleSynthetic(benchmark::State& state) {
  const Arms x = arms(25);
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto stream = sample_synthetic(x.a, x.b, x.imp, trials, seed++);
    benchmark::DoNotOptimize(stream.events.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleSynthetic)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_BuildHistograms(benchmark::State& state) {
  const Arms x = arms(25);
  const auto stream = sample_synthetic(x.a, x.b, x.imp, 1'000'000, 7);
  const GateSpec gates = synthetic_gates({}, x.a.grid.horizon() + x.a.grid.dt, 0.125);
  const auto shards = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const HistogramSet h = build_histograms(stream, gates, shards);
    benchmark::DoNotOptimize(h.trials);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.events.size()));
}
BENCHMARK(BM_BuildHistograms)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
