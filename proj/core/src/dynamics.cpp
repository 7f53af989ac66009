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

#include "homsim/dynamics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "homsim/error.hpp"

namespace homsim {
namespace {

constexpr cplx kI{0.0, 1.0};

Matrix4c hamiltonian_for(const SourceParams& p, bool drive_is_on) {
  const double rabi = drive_is_on ? p.omega_drive : 0.0;
  const double stark = p.stark_shift(drive_is_on);
  Matrix4c h = Matrix4c::Zero();
  h(kS0, kP0) = h(kP0, kS0) = rabi / 2.0;
  h(kD1, kD1) = stark;
  h(kD1, kP0) = h(kP0, kD1) = p.g_eff;
  h(kP0, kP0) = -p.delta + stark;
  h(kD0, kD0) = stark;
  return h;
}

template <typename M>
void require_finite(const M& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite entries in ") + what);
}

Liouvillian kron(const Matrix4c& a, const Matrix4c& b) {
  Liouvillian out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  }
  return out;
}

Liouvillian liouvillian_impl(const Matrix4c& h, std::span<const Matrix4c> jumps, bool with_sandwich) {
  const Matrix4c id = Matrix4c::Identity();
  Liouvillian out = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& l : jumps) {
    const Matrix4c ldl = l.adjoint() * l;
    if (with_sandwich) out += kron(l.conjugate(), l);
    out -= 0.5 * (kron(id, ldl) + kron(ldl.transpose(), id));
  }
  return out;
}

/// exp(L h) and its integral over [0, h], from one exponential of the block
/// matrix [[L, I], [0, 0]] h.
struct StepMaps {
  Liouvillian propagator;
  Liouvillian integral;
};

StepMaps exponentiate_with_integral(const Liouvillian& generator, double h) {
  Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(32, 32);
  aug.topLeftCorner(16, 16) = generator * h;
  aug.topRightCorner(16, 16) = Eigen::MatrixXcd::Identity(16, 16) * h;
  const Eigen::MatrixXcd e = aug.exp();
  StepMaps maps{e.topLeftCorner(16, 16), e.topRightCorner(16, 16)};
  require_finite(maps.propagator, "step propagator");
  require_finite(maps.integral, "step integral");
  return maps;
}

struct SegmentPair {
  StepMaps on;
  StepMaps off;
  const StepMaps& for_step(const SourceParams& p, std::size_t k) const {
    return p.drive_on_step(k) ? on : off;
  }
};

SegmentPair segment_maps(const SourceParams& p, double h) {
  const auto jumps = build_jump_operators(p);
  const Matrix4c h_on = hamiltonian_for(p, true);
  const Matrix4c h_off = hamiltonian_for(p, false);
  require_finite(h_on, "Hamiltonian");
  return {exponentiate_with_integral(build_liouvillian(h_on, jumps), h),
          exponentiate_with_integral(build_liouvillian(h_off, jumps), h)};
}

inline int vec_index(int row, int col) { return row + 4 * col; }

}  // namespace

AtomCavityState AtomCavityState::ground() {
  AtomCavityState s;
  s.rho(kS0, kS0) = 1.0;
  return s;
}

double AtomCavityState::min_eigenvalue() const {
  const Matrix4c herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double AtomCavityState::hermiticity_defect() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

Matrix4c build_hamiltonian(const SourceParams& p, double t) {
  if (!(t >= 0.0 && t <= p.t_horizon)) {
    std::ostringstream os;
    os << "build_hamiltonian: t = " << t << " us outside [0, " << p.t_horizon << "]";
    throw DomainError(os.str());
  }
  return hamiltonian_for(p, p.drive_on(t));
}

std::array<Matrix4c, 3> build_jump_operators(const SourceParams& p) {
  std::array<Matrix4c, 3> ops;
  for (auto& m : ops) m.setZero();
  ops[0](kD0, kD1) = std::sqrt(2.0 * p.kappa);
  ops[1](kS0, kP0) = std::sqrt(2.0 * p.gamma_sp);
  ops[2](kD0, kP0) = std::sqrt(2.0 * p.gamma_dp);
  return ops;
}

Vector16c vectorize(const Matrix4c& rho) {
  Vector16c v;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) v(vec_index(i, j)) = rho(i, j);
  }
  return v;
}

Matrix4c unvectorize(const Vector16c& v) {
  Matrix4c rho;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) rho(i, j) = v(vec_index(i, j));
  }
  return rho;
}

Liouvillian build_liouvillian(const Matrix4c& h, std::span<const Matrix4c> jumps) {
  return liouvillian_impl(h, jumps, true);
}

Liouvillian build_no_jump_liouvillian(const Matrix4c& h, std::span<const Matrix4c> jumps) {
  return liouvillian_impl(h, jumps, false);
}

Matrix3c build_no_jump_generator(const Matrix4c& h, std::span<const Matrix4c> jumps) {
  Matrix4c gen = -kI * h;
  for (const auto& l : jumps) gen -= 0.5 * (l.adjoint() * l);
  return gen.topLeftCorner<3, 3>();
}

ConditionalStepMaps::ConditionalStepMaps(const SourceParams& p) : params_(p) {
  p.validate();
  const auto jumps = build_jump_operators(p);
  const Matrix4c h_on = hamiltonian_for(p, true);
  const Matrix4c h_off = hamiltonian_for(p, false);
  require_finite(h_on, "Hamiltonian");
  on_ = (build_no_jump_generator(h_on, jumps) * p.dt).exp();
  off_ = (build_no_jump_generator(h_off, jumps) * p.dt).exp();
  require_finite(on_, "conditional propagator");
  require_finite(off_, "conditional propagator");
}

MasterSolution propagate_master_detailed(const SourceParams& p, const AtomCavityState& rho0) {
  p.validate();
  require_finite(rho0.rho, "initial state");
  const TimeGrid grid = p.grid();
  const SegmentPair half = segment_maps(p, 0.5 * p.dt);

  MasterSolution sol;
  sol.grid = grid;
  sol.states.resize(grid.size);
  sol.cell_integrals.assign(grid.size, Matrix4c::Zero());
  sol.states[0] = rho0;

  Vector16c v = vectorize(rho0.rho);
  for (std::size_t k = 0; k + 1 < grid.size; ++k) {
    const StepMaps& maps = half.for_step(p, k);
    sol.cell_integrals[k] += unvectorize(maps.integral * v);
    const Vector16c mid = maps.propagator * v;
    sol.cell_integrals[k + 1] += unvectorize(maps.integral * mid);
    v = maps.propagator * mid;
    sol.states[k + 1].rho = unvectorize(v);
  }
  require_finite(v, "master-equation solution");
  return sol;
}

std::vector<AtomCavityState> propagate_master(const SourceParams& p, const AtomCavityState& rho0) {
  return propagate_master_detailed(p, rho0).states;
}

std::vector<ConditionalVector> propagate_conditional(const SourceParams& p, double s) {
  p.validate();
  if (s > p.t_horizon) {
    std::ostringstream os;
    os << "propagate_conditional: s = " << s << " us beyond horizon " << p.t_horizon;
    throw DomainError(os.str());
  }
  const TimeGrid grid = p.grid();
  const std::size_t first = grid.index_of(s);
  const ConditionalStepMaps maps(p);

  std::vector<ConditionalVector> out;
  out.reserve(grid.size - first);
  Vector3c phi = Vector3c::Zero();
  phi(kS0) = 1.0;
  out.push_back({phi, 1.0});
  for (std::size_t k = first; k + 1 < grid.size; ++k) {
    phi = maps.step(k) * phi;
    out.push_back({phi, phi.squaredNorm()});
  }
  return out;
}

std::vector<double> emission_probability_after(const SourceParams& p) {
  p.validate();
  const TimeGrid grid = p.grid();
  const SegmentPair full = segment_maps(p, p.dt);

  Eigen::Matrix<cplx, 1, 16> emission = Eigen::Matrix<cplx, 1, 16>::Zero();
  emission(vec_index(kD1, kD1)) = 2.0 * p.kappa;

  std::vector<double> out(grid.size, 0.0);
  Eigen::Matrix<cplx, 1, 16> future = Eigen::Matrix<cplx, 1, 16>::Zero();
  for (std::size_t j = grid.size - 1; j-- > 0;) {
    const StepMaps& maps = full.for_step(p, j);
    future = emission * maps.integral + future * maps.propagator;
    out[j] = future(vec_index(kS0, kS0)).real();
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const Matrix4c& m) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (j) out << ',';
      out << m(i, j).real() << ',' << m(i, j).imag();
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace homsim
