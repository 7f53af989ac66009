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

#include "homsim/netlink.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "homsim/error.hpp"

namespace homsim {

void LinkSpec::validate() const {
  auto nonneg = [](double x, const char* name) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(std::string("link: ") + name + " must be finite and >= 0");
    }
  };
  nonneg(r_gen, "r_gen");
  nonneg(c_perp, "c_perp");
  nonneg(fiber_km, "fiber_km");
  nonneg(atten_db_per_km, "atten_db_per_km");
  nonneg(dark_rate, "dark_rate");
  nonneg(proportionality, "proportionality");
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("link: v must lie in [0, 1]");
  if (attenuated_arms < 0 || attenuated_arms > 2) {
    throw DomainError("link: attenuated_arms must be 0, 1 or 2");
  }
}

double fidelity_from_visibility(double v) { return (1.0 + v) / 2.0; }

double fiber_transmission(double fiber_km, double atten_db_per_km) {
  return std::pow(10.0, -atten_db_per_km * fiber_km / 10.0);
}

LinkReport swap_rate(const LinkSpec& spec) {
  spec.validate();
  LinkReport r;
  r.spec = spec;
  r.fidelity = fidelity_from_visibility(spec.v);
  r.transmission = fiber_transmission(spec.fiber_km, spec.atten_db_per_km);
  double factor = 1.0;
  for (int arm = 0; arm < spec.attenuated_arms; ++arm) factor *= r.transmission;
  r.c_perp_attenuated = spec.c_perp * factor;
  r.rate = spec.proportionality * spec.r_gen * r.c_perp_attenuated;
  r.snr = spec.dark_rate > 0.0 ? r.rate / spec.dark_rate : std::numeric_limits<double>::infinity();
  return r;
}

std::string to_json(const LinkReport& report) {
  const LinkSpec& s = report.spec;
  nlohmann::ordered_json j;
  j["inputs"] = {{"v", s.v},
                 {"r_gen_per_s", s.r_gen},
                 {"c_perp", s.c_perp},
                 {"fiber_km", s.fiber_km},
                 {"atten_db_per_km", s.atten_db_per_km},
                 {"attenuated_arms", s.attenuated_arms},
                 {"dark_rate_per_s", s.dark_rate},
                 {"proportionality", s.proportionality}};
  j["fidelity"] = report.fidelity;
  j["fiber_transmission_per_arm"] = report.transmission;
  j["c_perp_attenuated"] = report.c_perp_attenuated;
  j["swap_rate_per_s"] = report.rate;
  if (std::isfinite(report.snr)) {
    j["snr"] = report.snr;
  } else {
    j["snr"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace homsim
