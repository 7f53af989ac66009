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

#include "homsim/source_params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homsim/error.hpp"

namespace homsim {
namespace {

constexpr double kGridTolerance = 1e-9;

bool on_grid(double t, double dt) {
  const double steps = t / dt;
  return std::abs(steps - std::round(steps)) <= kGridTolerance * std::max(1.0, std::abs(steps));
}

std::size_t steps_of(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("source parameters: " + what);
}

}  // namespace

std::size_t TimeGrid::index_of(double t) const {
  if (!(t >= -kGridTolerance * dt) || t > horizon() + kGridTolerance * dt || !on_grid(t, dt)) {
    std::ostringstream os;
    os << "time " << t << " us is not a point of the grid (dt = " << dt << " us, horizon "
       << horizon() << " us)";
    throw DomainError(os.str());
  }
  return std::min(steps_of(t, dt), size - 1);
}

void SourceParams::validate() const {
  for (double v : {omega_drive, pulse_on, pulse_off, delta, g_eff, kappa, gamma_sp, gamma_dp,
                   t_horizon, dt}) {
    require(std::isfinite(v), "non-finite field");
  }
  if (delta_stark) require(std::isfinite(*delta_stark), "non-finite delta_stark");
  require(kappa >= 0.0, "kappa must be >= 0");
  require(gamma_sp >= 0.0, "gamma_sp must be >= 0");
  require(gamma_dp >= 0.0, "gamma_dp must be >= 0");
  require(dt > 0.0, "dt must be > 0");
  require(pulse_on >= 0.0, "pulse_on must be >= 0");
  require(pulse_off >= pulse_on, "pulse_off must be >= pulse_on");
  require(t_horizon >= pulse_off, "t_horizon must be >= pulse_off");
  require(t_horizon >= dt, "dt is longer than the simulated horizon");
  require(on_grid(t_horizon, dt), "t_horizon must be a multiple of dt");
  require(on_grid(pulse_on, dt), "pulse_on must be a multiple of dt");
  require(on_grid(pulse_off, dt), "pulse_off must be a multiple of dt");
  if (!delta_stark && omega_drive != 0.0) {
    require(delta != 0.0, "automatic Stark compensation needs a nonzero delta");
  }
}

TimeGrid SourceParams::grid() const { return TimeGrid{dt, steps_of(t_horizon, dt) + 1}; }

std::size_t SourceParams::pulse_on_index() const { return steps_of(pulse_on, dt); }
std::size_t SourceParams::pulse_off_index() const { return steps_of(pulse_off, dt); }

bool SourceParams::drive_on_step(std::size_t k) const {
  return k >= pulse_on_index() && k < pulse_off_index();
}

double SourceParams::stark_shift(bool drive_is_on) const {
  if (delta_stark) return *delta_stark;
  if (!drive_is_on || omega_drive == 0.0) return 0.0;
  return omega_drive * omega_drive / (4.0 * delta);
}

double SourceParams::slow_rate_bound() const {
  const double gamma_p = gamma_sp + gamma_dp;
  double raman = 0.0;
  double scatter = 0.0;
  if (delta != 0.0) {
    raman = std::abs(omega_drive * g_eff / (2.0 * delta));
    scatter = 2.0 * gamma_p * omega_drive * omega_drive / (4.0 * delta * delta);
  }
  return std::max({2.0 * kappa, raman, scatter});
}

}  // namespace homsim
