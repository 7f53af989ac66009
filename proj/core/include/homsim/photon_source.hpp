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

#include <Eigen/Core>

#include "homsim/dynamics.hpp"
#include "homsim/source_params.hpp"

namespace homsim {

/// Packed lower-triangular table of the conditional photon amplitudes
/// psi_s(t): row s holds t = s .. n-1, and psi_s(t) = 0 for t < s.
class Wavepackets {
 public:
  Wavepackets() = default;
  explicit Wavepackets(std::size_t n);

  std::size_t size() const { return n_; }
  cplx operator()(std::size_t s, std::size_t t) const {
    return t < s ? cplx{} : data_[offset(s) + (t - s)];
  }
  std::span<const cplx> row(std::size_t s) const { return {data_.data() + offset(s), n_ - s}; }
  std::span<cplx> row(std::size_t s) { return {data_.data() + offset(s), n_ - s}; }

 private:
  std::size_t offset(std::size_t s) const { return s * n_ - s * (s - 1) / 2; }

  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

struct SourceOptions {
  /// Escalates grid and truncation warnings into errors.
  bool strict = false;
  /// Maximum allowed |P0(identity) - P0(direct)|.
  double identity_tolerance = 1e-4;
  /// Maximum |d,1> population left at the horizon before warning.
  double truncation_tolerance = 1e-4;
};

struct ConditionalAmplitudes {
  TimeGrid grid;
  Wavepackets psi;
  /// p_pure(s) = sum_t |psi_s(t)|^2 dt.
  std::vector<double> p_pure;
  std::vector<std::string> warnings;
};

struct ScatterRate {
  /// P(s) in 1/us, averaged over the cell [s - dt/2, s + dt/2] so that
  /// sum_s P(s) dt is the exact time integral of the p->s scattering rate.
  std::vector<double> rate;
  /// Vacuum weight from the normalization identity.
  double p0 = 0.0;
  /// Vacuum weight from integrated p->d scattering plus the population still
  /// in the undecayed manifold at the horizon.
  double p0_direct = 0.0;
  /// Probability of eventual photon emission after a restart in |s,0> at s.
  std::vector<double> emission_after;
  /// |d,1> population at the horizon (truncated emission tail).
  double residual_cavity_population = 0.0;
  std::vector<std::string> warnings;
};

/// The emitted single-photon-plus-vacuum state of one source, with the
/// detection efficiency `eta` already applied to `kernel`.
struct PhotonRecord {
  TimeGrid grid;
  Wavepackets psi;
  std::vector<double> p_pure;
  std::vector<double> scatter_rate;
  std::vector<double> emission_after;
  double p0 = 0.0;
  double p0_direct = 0.0;
  double eta = 1.0;
  /// G(t, t') = eta [psi_0(t) psi_0*(t') + sum_s P(s) psi_s(t) psi_s*(t') dt].
  Eigen::MatrixXcd kernel;
  std::vector<std::string> warnings;

  double emission_probability() const { return 1.0 - p0; }
  double detection_probability() const { return eta * (1.0 - p0); }
  /// Vacuum weight after the loss channel: 1 - eta (1 - P0).
  double detected_vacuum() const { return 1.0 - eta * (1.0 - p0); }
};

ConditionalAmplitudes compute_conditional_amplitudes(const SourceParams& p,
                                                     const SourceOptions& options = {});

/// Requires p_pure from compute_conditional_amplitudes on the same grid.
/// Throws NumericError when the two vacuum-weight routes disagree by more
/// than options.identity_tolerance.
ScatterRate compute_scatter_rate(const SourceParams& p, std::span<const double> p_pure,
                                 const SourceOptions& options = {});

/// Coherence kernel from the conditional dynamics. Uses the factorization
/// G(t_i, t_j) = 2 kappa <d,1| M(t_i, t_j) Q_j |d,1> for i >= j, where Q_j
/// accumulates the weighted conditional states at t_j; O(N^2) overall.
/// DomainError if eta is outside [0, 1].
Eigen::MatrixXcd assemble_kernel(const SourceParams& p, const ConditionalAmplitudes& amplitudes,
                                 std::span<const double> scatter_rate, double eta);

PhotonRecord make_photon_record(const SourceParams& p, double eta,
                                const SourceOptions& options = {});

/// Applies the efficiency to a record built with eta = 1.
PhotonRecord with_efficiency(PhotonRecord unit, double eta);

/// Efficiency that makes the detected photon probability eta (1 - P0) equal
/// `detect_prob`. DomainError if it would exceed 1.
double efficiency_for_detection(const PhotonRecord& unit, double detect_prob);

struct ScatterCount {
  /// Expected number of p->s scattering events per run.
  double unconditional = 0.0;
  /// Expected number given that the cavity photon is emitted; empty when
  /// no photon is ever emitted.
  std::optional<double> conditional_on_emission;
};

ScatterCount expected_scatter_count(std::span<const double> scatter_rate,
                                    std::span<const double> emission_after, double p0, double dt);
ScatterCount expected_scatter_count(const PhotonRecord& record);

/// Sum of the kernel diagonal times dt: the detected photon probability.
double kernel_weight(const PhotonRecord& record);

/// CSV of (s_us, t_us, re_psi, im_psi) for t >= s, thinned by `stride`.
void write_wavepackets_csv(std::ostream& out, const PhotonRecord& record, std::size_t stride = 1);
/// CSV of (t_us, tp_us, re_G, im_G), thinned by `stride`.
void write_kernel_csv(std::ostream& out, const PhotonRecord& record, std::size_t stride = 1);

}  // namespace homsim
