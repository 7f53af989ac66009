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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homsim/hom.hpp"
#include "homsim/photon_source.hpp"
#include "homsim/source_params.hpp"

namespace homsim {

enum class Objective {
  /// Maximize V subject to P_succ >= threshold.
  kMaxVAtPsucc,
  /// Maximize P_succ subject to V >= threshold.
  kMaxPsuccAtV,
};

const char* objective_name(Objective o);
/// Accepts "max_V_at_Psucc" and "max_Psucc_at_V"; ConfigError otherwise.
Objective parse_objective(const std::string& name);

struct SweepSpec {
  SourceParams short_arm;
  SourceParams long_arm;
  double eta_short = 1.0;
  double eta_long = 1.0;
  ImperfectionParams imperfections;
  double bin_width = 0.125;
  /// Drive Rabi frequencies (rad/us) applied to both arms.
  std::vector<double> omega_values;
  /// Coincidence windows T (us), multiples of bin_width.
  std::vector<double> window_values;
  Objective objective = Objective::kMaxPsuccAtV;
  /// Golden-section refinement over omega around the grid optimum.
  bool refine = false;
  std::size_t refine_iterations = 12;
  /// Worker threads; the table does not depend on this.
  std::size_t jobs = 1;
  SourceOptions source_options;

  /// ConfigError on empty lists or invalid members.
  void validate() const;
};

struct SweepRow {
  double omega = 0.0;
  double window = 0.0;
  std::optional<double> visibility;
  double p_succ = 0.0;
};

/// V(T) and P_succ(T) for one drive strength.
std::vector<VisibilityPoint> evaluate_omega(const SweepSpec& spec, double omega);

/// One row per (omega, T), ordered by omega index then T index.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

struct OptimumResult {
  bool feasible = false;
  double omega = 0.0;
  double window = 0.0;
  double visibility = 0.0;
  double p_succ = 0.0;
  bool refined = false;
  /// Why no point qualified, when infeasible.
  std::string reason;
};

/// Best grid point of `rows` under the spec's objective and threshold.
OptimumResult best_grid_point(std::span<const SweepRow> rows, Objective objective,
                              double threshold);

/// Sweeps, picks the grid optimum and optionally refines omega.
OptimumResult find_optimal_omega(const SweepSpec& spec, double threshold);
OptimumResult find_optimal_omega(const SweepSpec& spec, std::span<const SweepRow> rows,
                                 double threshold);

struct FrontierPoint {
  double p_succ = 0.0;
  double visibility = 0.0;
};

/// (P_succ, V) points of one omega, sorted by P_succ. Rows without a
/// visibility are skipped.
std::vector<FrontierPoint> frontier(std::span<const SweepRow> rows, double omega);

/// Linear interpolation of V at `p_succ`; empty outside the curve's range.
std::optional<double> interpolate_visibility(std::span<const FrontierPoint> curve, double p_succ);

struct DominanceReport {
  bool dominates = true;
  /// Smallest V_ref - V_other over the compared points.
  double worst_margin = 0.0;
  double worst_p_succ = 0.0;
  std::size_t points_compared = 0;
};

/// Compares two frontiers at every P_succ sample of either curve inside
/// their common range where either curve has V >= v_floor.
DominanceReport compare_frontiers(std::span<const FrontierPoint> reference,
                                  std::span<const FrontierPoint> other, double v_floor,
                                  double tolerance = 0.0);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace homsim
