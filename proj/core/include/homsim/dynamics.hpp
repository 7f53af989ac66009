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

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "homsim/source_params.hpp"

namespace homsim {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Matrix3c = Eigen::Matrix<cplx, 3, 3>;
using Vector3c = Eigen::Matrix<cplx, 3, 1>;
using Vector16c = Eigen::Matrix<cplx, 16, 1>;
using Liouvillian = Eigen::Matrix<cplx, 16, 16>;

/// Fixed ordering of the atom-cavity basis. Serialized matrices use it.
enum Level : int {
  kS0 = 0,  ///< |s,0>
  kD1 = 1,  ///< |d,1>
  kP0 = 2,  ///< |p,0>
  kD0 = 3,  ///< |d,0>, absorbing after emission or p->d scattering
};

/// Atom-cavity density matrix over {|s,0>, |d,1>, |p,0>, |d,0>}.
struct AtomCavityState {
  Matrix4c rho = Matrix4c::Zero();

  static AtomCavityState ground();

  double trace() const { return rho.trace().real(); }
  double population(Level level) const { return rho(level, level).real(); }
  double purity() const { return (rho * rho).trace().real(); }
  double min_eigenvalue() const;
  /// max |rho - rho^dagger| entry.
  double hermiticity_defect() const;
};

/// No-jump state Phi_{t|s} over {|s,0>, |d,1>, |p,0>} and its squared norm.
struct ConditionalVector {
  Vector3c phi = Vector3c::Zero();
  double norm_sq = 0.0;
};

/// Rotating-frame Hamiltonian at time t. DomainError when t is outside
/// [0, t_horizon].
Matrix4c build_hamiltonian(const SourceParams& p, double t);

/// Cavity emission L1 = sqrt(2 kappa)|d,0><d,1|, p->s scattering
/// L2 = sqrt(2 gamma_sp)|s,0><p,0| and p->d scattering
/// L3 = sqrt(2 gamma_dp)|d,0><p,0|, in that order.
std::array<Matrix4c, 3> build_jump_operators(const SourceParams& p);

/// Column-stacking vectorization: vec(rho)[i + 4 j] = rho(i, j).
Vector16c vectorize(const Matrix4c& rho);
Matrix4c unvectorize(const Vector16c& v);

/// Generator of d vec(rho)/dt for the Lindblad equation with Hamiltonian h
/// and the given jump operators.
Liouvillian build_liouvillian(const Matrix4c& h, std::span<const Matrix4c> jumps);

/// Same generator with the jump (sandwich) terms L rho L^dagger removed: the
/// density-matrix form of no-jump evolution.
Liouvillian build_no_jump_liouvillian(const Matrix4c& h, std::span<const Matrix4c> jumps);

/// 3x3 restriction of -iH - 1/2 sum L^dagger L to the undecayed manifold.
Matrix3c build_no_jump_generator(const Matrix4c& h, std::span<const Matrix4c> jumps);

/// One-step maps of the conditional (no-jump) evolution on the grid of `p`.
/// The drive is constant within each step, so exactly two maps exist.
class ConditionalStepMaps {
 public:
  explicit ConditionalStepMaps(const SourceParams& p);

  const Matrix3c& step(std::size_t k) const { return params_.drive_on_step(k) ? on_ : off_; }
  const Matrix3c& drive_on() const { return on_; }
  const Matrix3c& drive_off() const { return off_; }

 private:
  SourceParams params_;
  Matrix3c on_;
  Matrix3c off_;
};

/// Master-equation solution on the grid plus, per grid point k, the exact
/// integral of rho over the cell [t_k - dt/2, t_k + dt/2] clipped to
/// [0, t_horizon].
struct MasterSolution {
  TimeGrid grid;
  std::vector<AtomCavityState> states;
  std::vector<Matrix4c> cell_integrals;
};

/// Solves the Lindblad equation by exact exponentiation of the 16x16
/// Liouvillian on every constant-drive segment. Default initial state is
/// |s,0><s,0|.
std::vector<AtomCavityState> propagate_master(const SourceParams& p,
                                              const AtomCavityState& rho0 = AtomCavityState::ground());

MasterSolution propagate_master_detailed(const SourceParams& p,
                                         const AtomCavityState& rho0 = AtomCavityState::ground());

/// Conditional evolution from Phi_s = |s,0> at grid time s; element i is
/// Phi at t = s + i dt. DomainError when s is beyond the horizon or off grid.
std::vector<ConditionalVector> propagate_conditional(const SourceParams& p, double s);

/// For every grid time t_k: probability that a system restarted in |s,0> at
/// t_k emits its cavity photon (L1) before the horizon, jumps included.
/// Integrated exactly per step.
std::vector<double> emission_probability_after(const SourceParams& p);

/// Row-major CSV, one row per matrix row, "re,im" pairs per entry.
void write_matrix_csv(std::ostream& out, const Matrix4c& m);

}  // namespace homsim
