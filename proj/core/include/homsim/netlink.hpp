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

#include <string>

namespace homsim {

struct LinkSpec {
  double r_gen = 0.0;  ///< attempt rate (1/s)
  double c_perp = 0.0;
  double v = 0.0;
  double fiber_km = 0.0;
  double atten_db_per_km = 0.18;
  double dark_rate = 0.0;  ///< 1/s
  double proportionality = 1.0;
  /// Number of photon arms that traverse the extra fiber (0, 1 or 2).
  int attenuated_arms = 1;

  /// DomainError on negative fields or v outside [0, 1].
  void validate() const;
};

struct LinkReport {
  LinkSpec spec;
  double fidelity = 0.0;
  double transmission = 1.0;  ///< per-arm fiber factor
  double c_perp_attenuated = 0.0;
  double rate = 0.0;  ///< 1/s
  /// rate / dark_rate; infinite when dark_rate is 0.
  double snr = 0.0;
};

/// F = (1 + v) / 2.
double fidelity_from_visibility(double v);

/// 10^(-atten * km / 10).
double fiber_transmission(double fiber_km, double atten_db_per_km);

LinkReport swap_rate(const LinkSpec& spec);

/// Flat JSON object with every input and derived value.
std::string to_json(const LinkReport& report);

}  // namespace homsim
