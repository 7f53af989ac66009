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

#include <numbers>

// Internal unit system: angular frequencies in rad/us, times in us.
// An ordinary frequency nu given in MHz maps to omega = 2*pi*nu rad/us.
namespace homsim::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double mhz(double nu) { return kTwoPi * nu; }
constexpr double khz(double nu) { return kTwoPi * nu * 1e-3; }
constexpr double to_mhz(double omega) { return omega / kTwoPi; }

constexpr double ns(double t) { return t * 1e-3; }
constexpr double us(double t) { return t; }

inline constexpr double kPicosecondsPerMicrosecond = 1e6;

}  // namespace homsim::units
