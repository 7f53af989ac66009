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

#include <cmath>
#include <filesystem>
#include <random>

#include "homsim/config.hpp"
#include "homsim/source_params.hpp"
#include "homsim/units.hpp"

namespace homsim::test {

using units::mhz;

inline std::filesystem::path preset_dir() { return HOMSIM_TEST_PRESET_DIR; }

inline ScenarioConfig preset(const std::string& name) {
  LoadOptions o;
  o.preset = name;
  o.preset_dir = preset_dir();
  return load_scenario(o);
}

/// Delay-line source parameters typed in directly (no config parsing).
inline SourceParams delay_line_source(double beta_sq) {
  SourceParams p;
  p.omega_drive = mhz(63.5);
  p.delta = -mhz(403.0);
  p.g_eff = 0.75 * std::sqrt(beta_sq) * mhz(1.53);
  p.kappa = mhz(0.07);
  p.gamma_sp = mhz(10.7);
  p.gamma_dp = mhz(0.68);
  p.pulse_on = 0.0;
  p.pulse_off = 9.4;
  p.t_horizon = 17.0;
  p.dt = 0.005;
  return p;
}

/// Drive-sweep source with the drive left on.
inline SourceParams always_on_source(double omega_mhz) {
  SourceParams p;
  p.omega_drive = mhz(omega_mhz);
  p.delta = -mhz(400.0);
  p.g_eff = 1.2 * std::sqrt(4.0 / 15.0) * mhz(1.0);
  p.kappa = mhz(0.07);
  p.gamma_sp = mhz(10.7);
  p.gamma_dp = mhz(0.7);
  p.pulse_on = 0.0;
  p.pulse_off = 20.0;
  p.t_horizon = 20.0;
  p.dt = 0.005;
  return p;
}

/// Same physics on a coarser grid for expensive oracles.
inline SourceParams coarse(SourceParams p, double dt, double horizon) {
  p.dt = dt;
  p.t_horizon = horizon;
  if (p.pulse_off > horizon) p.pulse_off = horizon;
  return p;
}

/// Random physical source within a band around the experimental values.
inline SourceParams random_source(std::mt19937_64& rng, double dt = 0.005) {
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };
  SourceParams p;
  p.omega_drive = mhz(u(20.0, 80.0));
  p.delta = -mhz(u(250.0, 600.0));
  p.g_eff = mhz(u(0.3, 1.5));
  p.kappa = mhz(u(0.06, 0.15));
  p.gamma_sp = mhz(u(5.0, 15.0));
  p.gamma_dp = mhz(u(0.3, 1.2));
  p.pulse_on = 0.0;
  p.pulse_off = dt * std::round(u(4.0, 10.0) / dt);
  // Leave five cavity lifetimes after switch-off so the tail is complete.
  p.t_horizon = p.pulse_off + dt * std::ceil(5.0 / p.kappa / dt);
  p.dt = dt;
  return p;
}

}  // namespace homsim::test
