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
#include <vector>

#include <Eigen/Core>

#include "homsim/photon_source.hpp"

namespace homsim {

/// Imperfections beyond spontaneous scattering.
struct ImperfectionParams {
  /// Mode-mismatch probability: p_par <- (1 - epsilon) p_par + epsilon p_perp.
  double epsilon = 0.0;
  /// Constant inter-photon frequency offset (rad/us).
  double omega_offset = 0.0;
  /// Standard deviation of the linear frequency drift rate (rad/us^2).
  double sigma_drift = 0.0;
  /// Generation separation of the two interfering photons (us).
  double tau_gen = 13.35;
  /// Constant coincidence-probability density added to both tau densities
  /// (1/us).
  double background_density = 0.0;

  /// DomainError on out-of-range fields.
  void validate() const;

  bool operator==(const ImperfectionParams&) const = default;
};

/// Drift rate spread from the frequency deviation accumulated over t_bar:
/// sigma = sqrt(v(t_bar)) / t_bar. The argument is sqrt(v) in rad/us.
double drift_sigma(double sqrt_v, double t_bar);

/// Two-detector coincidence density on the (t1, t2) grid and its marginal in
/// tau = t1 - t2. lag[m + n - 1] holds the density at tau = m dt (1/us),
/// summed over t2 in ascending order.
struct CoincidenceDensity {
  TimeGrid grid;
  /// joint(i, j): density for D1 at t_i and D2 at t_j (1/us^2). Empty when
  /// the joint table was not requested.
  Eigen::MatrixXd joint;
  std::vector<double> lag;
  /// Constant floor added when the marginal is binned (1/us).
  double background_density = 0.0;

  double at_lag(long m) const;
  double total() const;
};

/// Densities over tau in bins [k w, (k + 1) w), k = -half_bins .. half_bins - 1.
/// Each lag sample m of a CoincidenceDensity stands for the cell
/// [(m - 1/2) dt, (m + 1/2) dt]; bins take the overlapping share of each cell.
struct TauHistogram {
  double bin_width = 0.0;
  long half_bins = 0;
  std::vector<double> density;

  double bin_start(std::size_t b) const { return (static_cast<long>(b) - half_bins) * bin_width; }
  double bin_center(std::size_t b) const { return bin_start(b) + 0.5 * bin_width; }
  /// Integral over [-T, T); T must be a multiple of the bin width.
  double integral(double window) const;
};

struct VisibilityPoint {
  double window = 0.0;
  std::optional<double> visibility;
  double p_succ = 0.0;
};

struct CoincidenceResult {
  TauHistogram p_parallel;
  TauHistogram p_perp;
  std::vector<VisibilityPoint> curve;
};

/// Click density of one detector behind the 50:50 splitter: G(t, t) / 2.
std::vector<double> single_click_density(const PhotonRecord& record);

/// Orthogonally polarized photons: no interference.
CoincidenceDensity coincidence_orthogonal(const PhotonRecord& a, const PhotonRecord& b,
                                          double background_density = 0.0, bool keep_joint = true);

/// Parallel polarization with two-photon interference, frequency offset and
/// drift dephasing on the cross term, then mode-mismatch mixing with the
/// orthogonal case.
CoincidenceDensity coincidence_parallel(const PhotonRecord& a, const PhotonRecord& b,
                                        const ImperfectionParams& imp, bool keep_joint = true);

TauHistogram bin_tau(const CoincidenceDensity& density, double bin_width);

/// V(T) = 1 - C_par(T) / C_perp(T) and P_succ(T) = C_perp(T) per window.
std::vector<VisibilityPoint> visibility_curve(const TauHistogram& parallel,
                                              const TauHistogram& perp,
                                              std::span<const double> windows);

/// Windows T = w, 2w, ... up to `max_window`.
std::vector<double> window_ladder(double bin_width, double max_window);

CoincidenceResult compute_coincidences(const PhotonRecord& a, const PhotonRecord& b,
                                       const ImperfectionParams& imp, double bin_width,
                                       std::span<const double> windows);

void write_coincidence_csv(std::ostream& out, const CoincidenceResult& result);
void write_visibility_csv(std::ostream& out, std::span<const VisibilityPoint> curve);

}  // namespace homsim
