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

#include "homsim/photon_source.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "homsim/error.hpp"

namespace homsim {
namespace {

void check_grid(const SourceParams& p, const SourceOptions& options,
                std::vector<std::string>& warnings) {
  const double rate = p.slow_rate_bound();
  if (rate > 0.0 && p.dt > 1.0 / (10.0 * rate)) {
    std::ostringstream os;
    os << "grid step dt = " << p.dt << " us under-resolves the slow dynamics (rate bound "
       << rate << " rad/us, need dt <= " << 1.0 / (10.0 * rate) << " us)";
    if (options.strict) throw ConfigError(os.str());
    warnings.push_back(os.str());
  }
}

}  // namespace

Wavepackets::Wavepackets(std::size_t n) : n_(n), data_(n * (n + 1) / 2) {}

ConditionalAmplitudes compute_conditional_amplitudes(const SourceParams& p,
                                                     const SourceOptions& options) {
  p.validate();
  ConditionalAmplitudes out;
  check_grid(p, options, out.warnings);
  out.grid = p.grid();
  const std::size_t n = out.grid.size;
  out.psi = Wavepackets(n);
  out.p_pure.assign(n, 0.0);

  const ConditionalStepMaps maps(p);
  const double coupling = std::sqrt(2.0 * p.kappa);
  for (std::size_t s = 0; s < n; ++s) {
    auto row = out.psi.row(s);
    Vector3c phi = Vector3c::Zero();
    phi(kS0) = 1.0;
    row[0] = coupling * phi(kD1);
    double norm = std::norm(row[0]);
    for (std::size_t t = s + 1; t < n; ++t) {
      phi = maps.step(t - 1) * phi;
      row[t - s] = coupling * phi(kD1);
      norm += std::norm(row[t - s]);
    }
    out.p_pure[s] = norm * p.dt;
  }
  return out;
}

ScatterRate compute_scatter_rate(const SourceParams& p, std::span<const double> p_pure,
                                 const SourceOptions& options) {
  p.validate();
  const TimeGrid grid = p.grid();
  if (p_pure.size() != grid.size) {
    throw ConfigError("compute_scatter_rate: p_pure does not match the time grid");
  }
  const MasterSolution sol = propagate_master_detailed(p);

  ScatterRate out;
  out.rate.resize(grid.size);
  double p_to_d = 0.0;
  for (std::size_t k = 0; k < grid.size; ++k) {
    const double excited = sol.cell_integrals[k](kP0, kP0).real();
    out.rate[k] = 2.0 * p.gamma_sp * excited / p.dt;
    p_to_d += 2.0 * p.gamma_dp * excited;
  }

  double mixed = 0.0;
  for (std::size_t k = 0; k < grid.size; ++k) mixed += out.rate[k] * p_pure[k] * p.dt;
  out.p0 = 1.0 - p_pure[0] - mixed;

  const AtomCavityState& last = sol.states.back();
  const double residual =
      last.population(kS0) + last.population(kD1) + last.population(kP0);
  out.p0_direct = p_to_d + residual;
  out.residual_cavity_population = last.population(kD1);

  // A truncated tail leaves cavity population the identity does not see.
  const bool truncated = out.residual_cavity_population > options.truncation_tolerance;
  if (truncated) {
    std::ostringstream os;
    os << "emission tail truncated: |d,1> population " << out.residual_cavity_population
       << " remains at the horizon t = " << p.t_horizon << " us";
    if (options.strict) throw NumericError(os.str());
    out.warnings.push_back(os.str());
  }
  const double slack = truncated ? out.residual_cavity_population : 0.0;
  if (!std::isfinite(out.p0) ||
      std::abs(out.p0 - out.p0_direct) > options.identity_tolerance + slack) {
    std::ostringstream os;
    os << std::setprecision(10) << "normalization identity violated: P0 = " << out.p0
       << " from the identity but " << out.p0_direct
       << " from the direct form; refine the grid";
    throw NumericError(os.str());
  }
  out.emission_after = emission_probability_after(p);
  return out;
}

Eigen::MatrixXcd assemble_kernel(const SourceParams& p, const ConditionalAmplitudes& amplitudes,
                                 std::span<const double> scatter_rate, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "assemble_kernel: eta = " << eta << " outside [0, 1]";
    throw DomainError(os.str());
  }
  p.validate();
  const TimeGrid grid = p.grid();
  const std::size_t n = grid.size;
  if (amplitudes.grid != grid || scatter_rate.size() != n) {
    throw ConfigError("assemble_kernel: inputs are not on the grid of the source parameters");
  }

  const ConditionalStepMaps maps(p);
  const double two_kappa = 2.0 * p.kappa;
  Eigen::MatrixXcd kernel(n, n);

  // Q_j = sum_{s <= t_j} W_s Phi_{t_j|s} Phi_{t_j|s}^dagger with W_0 = 1 + P_0 dt
  // (the pure history plus the first scattering cell) and W_s = P_s dt.
  Matrix3c q = Matrix3c::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) {
      const Matrix3c& m = maps.step(j - 1);
      q = m * q * m.adjoint();
    }
    const double weight = scatter_rate[j] * grid.dt + (j == 0 ? 1.0 : 0.0);
    q(kS0, kS0) += weight;

    Vector3c u = q.col(kD1);
    kernel(j, j) = cplx(two_kappa * u(kD1).real(), 0.0);
    for (std::size_t i = j + 1; i < n; ++i) {
      u = maps.step(i - 1) * u;
      const cplx g = two_kappa * u(kD1);
      kernel(i, j) = g;
      kernel(j, i) = std::conj(g);
    }
  }
  if (eta != 1.0) kernel *= eta;
  return kernel;
}

PhotonRecord make_photon_record(const SourceParams& p, double eta, const SourceOptions& options) {
  ConditionalAmplitudes amplitudes = compute_conditional_amplitudes(p, options);
  ScatterRate scatter = compute_scatter_rate(p, amplitudes.p_pure, options);

  PhotonRecord rec;
  rec.kernel = assemble_kernel(p, amplitudes, scatter.rate, eta);
  rec.grid = amplitudes.grid;
  rec.psi = std::move(amplitudes.psi);
  rec.p_pure = std::move(amplitudes.p_pure);
  rec.scatter_rate = std::move(scatter.rate);
  rec.emission_after = std::move(scatter.emission_after);
  rec.p0 = scatter.p0;
  rec.p0_direct = scatter.p0_direct;
  rec.eta = eta;
  rec.warnings = std::move(amplitudes.warnings);
  rec.warnings.insert(rec.warnings.end(), scatter.warnings.begin(), scatter.warnings.end());
  return rec;
}

PhotonRecord with_efficiency(PhotonRecord unit, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "with_efficiency: eta = " << eta << " outside [0, 1]";
    throw DomainError(os.str());
  }
  if (unit.eta != 1.0) throw ConfigError("with_efficiency: record already carries an efficiency");
  if (eta != 1.0) unit.kernel *= eta;
  unit.eta = eta;
  return unit;
}

double efficiency_for_detection(const PhotonRecord& unit, double detect_prob) {
  const double emitted = unit.emission_probability();
  if (!(detect_prob >= 0.0) || !(emitted > 0.0) || detect_prob > emitted) {
    std::ostringstream os;
    os << "detection probability " << detect_prob << " is not reachable with emission probability "
       << emitted;
    throw DomainError(os.str());
  }
  return detect_prob / emitted;
}

ScatterCount expected_scatter_count(std::span<const double> scatter_rate,
                                    std::span<const double> emission_after, double p0, double dt) {
  if (scatter_rate.size() != emission_after.size()) {
    throw ConfigError("expected_scatter_count: arrays differ in length");
  }
  ScatterCount out;
  double with_emission = 0.0;
  for (std::size_t k = 0; k < scatter_rate.size(); ++k) {
    out.unconditional += scatter_rate[k] * dt;
    with_emission += scatter_rate[k] * emission_after[k] * dt;
  }
  const double emitted = 1.0 - p0;
  if (emitted > 0.0) out.conditional_on_emission = with_emission / emitted;
  return out;
}

ScatterCount expected_scatter_count(const PhotonRecord& record) {
  return expected_scatter_count(record.scatter_rate, record.emission_after, record.p0,
                                record.grid.dt);
}

double kernel_weight(const PhotonRecord& record) {
  return record.kernel.diagonal().real().sum() * record.grid.dt;
}

void write_wavepackets_csv(std::ostream& out, const PhotonRecord& record, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << std::setprecision(12);
  out << "s_us,t_us,re_psi_per_sqrt_us,im_psi_per_sqrt_us\n";
  const std::size_t n = record.grid.size;
  for (std::size_t s = 0; s < n; s += stride) {
    for (std::size_t t = s; t < n; t += stride) {
      const cplx v = record.psi(s, t);
      out << record.grid.at(s) << ',' << record.grid.at(t) << ',' << v.real() << ',' << v.imag()
          << '\n';
    }
  }
}

void write_kernel_csv(std::ostream& out, const PhotonRecord& record, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << std::setprecision(12);
  out << "t_us,tp_us,re_G_per_us,im_G_per_us\n";
  const std::size_t n = record.grid.size;
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j = 0; j < n; j += stride) {
      const cplx v = record.kernel(i, j);
      out << record.grid.at(i) << ',' << record.grid.at(j) << ',' << v.real() << ',' << v.imag()
          << '\n';
    }
  }
}

}  // namespace homsim
