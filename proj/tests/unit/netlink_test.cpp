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

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "homsim/error.hpp"
#include "homsim/netlink.hpp"

namespace homsim {
namespace {

LinkSpec measured() {
  LinkSpec s;
  s.v = 0.472;
  s.r_gen = 30000.0;
  s.c_perp = 1e-3;
  return s;
}

TEST(Fidelity, ClosedForm) {
  EXPECT_EQ(fidelity_from_visibility(1.0), 1.0);
  EXPECT_DOUBLE_EQ(fidelity_from_visibility(0.472), 0.736);
  EXPECT_NEAR(fidelity_from_visibility(0.37), 0.685, 1e-15);
  for (double f : {0.5, 0.61, 0.736, 0.99}) EXPECT_DOUBLE_EQ(fidelity_from_visibility(2.0 * f - 1.0), f);
}

TEST(Fidelity, StrictlyIncreasing) {
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double f = fidelity_from_visibility(k / 100.0);
    ASSERT_GT(f, prev);
    prev = f;
  }
}

TEST(SwapRate, MeasuredInputs) {
  const LinkReport r = swap_rate(measured());
  EXPECT_DOUBLE_EQ(r.rate, 30.0);
  EXPECT_DOUBLE_EQ(r.fidelity, 0.736);
  EXPECT_EQ(r.transmission, 1.0);
  EXPECT_TRUE(std::isinf(r.snr));
}

TEST(SwapRate, FiberAttenuation) {
  EXPECT_NEAR(fiber_transmission(50.0, 0.18), std::pow(10.0, -0.9), 1e-15);
  EXPECT_NEAR(fiber_transmission(50.0, 0.18), 0.1259, 1e-4);
  LinkSpec s = measured();
  s.fiber_km = 50.0;
  const double one = swap_rate(s).rate;
  EXPECT_NEAR(one, 30.0 * std::pow(10.0, -0.9), 1e-12);
  s.attenuated_arms = 2;
  EXPECT_NEAR(swap_rate(s).rate, 30.0 * std::pow(10.0, -1.8), 1e-12);
  s.attenuated_arms = 0;
  EXPECT_DOUBLE_EQ(swap_rate(s).rate, 30.0);
}

TEST(SwapRate, MonotoneInDistance) {
  LinkSpec s = measured();
  double prev = swap_rate(s).rate;
  for (double km = 5.0; km <= 200.0; km += 5.0) {
    s.fiber_km = km;
    const double r = swap_rate(s).rate;
    ASSERT_LT(r, prev);
    prev = r;
  }
}

TEST(SwapRate, ZeroAttemptRateAndSignalToNoise) {
  LinkSpec s = measured();
  s.r_gen = 0.0;
  EXPECT_EQ(swap_rate(s).rate, 0.0);
  s = measured();
  s.dark_rate = 3.0;
  s.proportionality = 0.5;
  const LinkReport r = swap_rate(s);
  EXPECT_DOUBLE_EQ(r.rate, 15.0);
  EXPECT_DOUBLE_EQ(r.snr, 5.0);
}

TEST(SwapRate, Validation) {
  LinkSpec s = measured();
  s.v = 1.2;
  EXPECT_THROW(swap_rate(s), DomainError);
  s = measured();
  s.fiber_km = -1.0;
  EXPECT_THROW(swap_rate(s), DomainError);
  s = measured();
  s.attenuated_arms = 3;
  EXPECT_THROW(swap_rate(s), DomainError);
  s = measured();
  s.r_gen = std::nan("");
  EXPECT_THROW(swap_rate(s), DomainError);
}

TEST(Json, CarriesInputsAndDerivedValues) {
  LinkSpec s = measured();
  const auto j = nlohmann::json::parse(to_json(swap_rate(s)));
  EXPECT_DOUBLE_EQ(j["fidelity"].get<double>(), 0.736);
  EXPECT_DOUBLE_EQ(j["swap_rate_per_s"].get<double>(), 30.0);
  EXPECT_DOUBLE_EQ(j["inputs"]["proportionality"].get<double>(), 1.0);
  EXPECT_EQ(j["inputs"]["attenuated_arms"].get<int>(), 1);
  EXPECT_TRUE(j["snr"].is_null());
  s.dark_rate = 10.0;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(to_json(swap_rate(s)))["snr"].get<double>(), 3.0);
}

}  // namespace
}  // namespace homsim
