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

#include <cstddef>
#include <optional>

namespace homsim {

/// Uniform time grid t_k = k * dt, k = 0 .. size-1 (us).
struct TimeGrid {
  double dt = 0.0;
  std::size_t size = 0;

  double at(std::size_t k) const { return static_cast<double>(k) * dt; }
  double horizon() const { return at(size == 0 ? 0 : size - 1); }

  /// Index of a time that lies on the grid; DomainError otherwise.
  std::size_t index_of(double t) const;

  bool operator==(const TimeGrid&) const = default;
};

/// Physical description of one photon source: a driven three-level ion in a
/// cavity. All rates and detunings are angular frequencies in rad/us, all
/// times in us.
///
/// The Raman drive is piecewise constant: `omega_drive` on [pulse_on,
/// pulse_off), zero elsewhere. `delta` is signed (the red-detuned
/// configuration uses a negative value). When `delta_stark` is empty the
/// compensation shift is Omega_t^2 / (4 Delta) on each drive segment, which
/// is zero while the drive is off.
struct SourceParams {
  double omega_drive = 0.0;
  double pulse_on = 0.0;
  double pulse_off = 9.4;
  double delta = 0.0;
  std::optional<double> delta_stark;
  double g_eff = 0.0;
  double kappa = 0.0;
  double gamma_sp = 0.0;
  double gamma_dp = 0.0;
  double t_horizon = 12.0;
  double dt = 0.005;

  /// Throws ConfigError when an invariant is violated: negative decay
  /// rates, non-positive dt, misordered pulse times, pulse edges or horizon
  /// off the dt grid, or non-finite fields.
  void validate() const;

  TimeGrid grid() const;
  std::size_t pulse_on_index() const;
  std::size_t pulse_off_index() const;

  /// Whether the drive is on during grid step k (from t_k to t_{k+1}).
  bool drive_on_step(std::size_t k) const;
  bool drive_on(double t) const { return t >= pulse_on && t < pulse_off; }

  double rabi(double t) const { return drive_on(t) ? omega_drive : 0.0; }
  double stark_shift(bool drive_is_on) const;
  double stark_shift_at(double t) const { return stark_shift(drive_on(t)); }

  /// Largest rate governing the sampled observables: cavity decay 2 kappa,
  /// the effective Raman coupling and the effective off-resonant scattering
  /// rate of the excited level. Used to flag grids that under-resolve the
  /// slow dynamics.
  double slow_rate_bound() const;

  bool operator==(const SourceParams&) const = default;
};

/// Effective ion-cavity coupling g = alpha * beta * g0.
constexpr double effective_coupling(double g0, double alpha, double beta) {
  return alpha * beta * g0;
}

}  // namespace homsim
