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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace homsim::oracle {
namespace {

using cd = std::complex<double>;
using State = std::vector<double>;

// Basis: 0 = |s,0>, 1 = |d,1>, 2 = |p,0>, 3 = |d,0>.
Eigen::Matrix4cd hamiltonian(const SourceParams& p, bool on) {
  const double omega = on ? p.omega_drive : 0.0;
  double stark = 0.0;
  if (p.delta_stark) {
    stark = *p.delta_stark;
  } else if (on && omega != 0.0) {
    stark = omega * omega / (4.0 * p.delta);
  }
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  h(0, 2) = h(2, 0) = omega / 2.0;
  h(1, 1) = stark;
  h(1, 2) = h(2, 1) = p.g_eff;
  h(2, 2) = -p.delta + stark;
  h(3, 3) = stark;
  return h;
}

Eigen::Matrix4cd unpack(const State& x) {
  Eigen::Matrix4cd m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = cd(x[2 * (4 * i + j)], x[2 * (4 * i + j) + 1]);
  }
  return m;
}

void pack(const Eigen::Matrix4cd& m, State& x) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      x[2 * (4 * i + j)] = m(i, j).real();
      x[2 * (4 * i + j) + 1] = m(i, j).imag();
    }
  }
}

/// Switch times of the drive inside (a, b).
std::vector<double> breakpoints(const SourceParams& p, double a, double b) {
  std::vector<double> out;
  for (double t : {p.pulse_on, p.pulse_off}) {
    if (t > a && t < b) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Rhs>
void integrate_piecewise(const SourceParams& p, State& x, double start,
                         const std::vector<double>& times, double tol, Rhs make_rhs,
                         std::vector<State>& samples) {
  namespace ode = boost::numeric::odeint;
  double t = start;
  for (double target : times) {
    auto stops = breakpoints(p, t, target);
    stops.push_back(target);
    for (double stop : stops) {
      if (stop > t) {
        const bool on = p.drive_on(0.5 * (t + stop));
        auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
        ode::integrate_adaptive(stepper, make_rhs(on), x, t, stop, 1e-4);
        t = stop;
      }
    }
    samples.push_back(x);
  }
}

}  // namespace

MasterReference integrate_master(const SourceParams& p, const std::vector<double>& times,
                                 double start, double tolerance) {
  const double k2 = 2.0 * p.kappa;
  const double sp2 = 2.0 * p.gamma_sp;
  const double dp2 = 2.0 * p.gamma_dp;
  const auto make_rhs = [&](bool on) {
    const Eigen::Matrix4cd h = hamiltonian(p, on);
    return [h, k2, sp2, dp2](const State& x, State& dxdt, double) {
      const Eigen::Matrix4cd r = unpack(x);
      Eigen::Matrix4cd d = cd(0.0, -1.0) * (h * r - r * h);
      // Cavity decay |d,1> -> |d,0>.
      d(3, 3) += k2 * r(1, 1);
      // Spontaneous decay of |p,0> into |s,0> and |d,0>.
      d(0, 0) += sp2 * r(2, 2);
      d(3, 3) += dp2 * r(2, 2);
      // Anticommutator terms.
      Eigen::Vector4d loss(0.0, k2, sp2 + dp2, 0.0);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) d(i, j) -= 0.5 * (loss(i) + loss(j)) * r(i, j);
      }
      pack(d, dxdt);
      dxdt[32] = k2 * r(1, 1).real();
      dxdt[33] = sp2 * r(2, 2).real();
      dxdt[34] = dp2 * r(2, 2).real();
    };
  };
  State x(35, 0.0);
  Eigen::Matrix4cd r0 = Eigen::Matrix4cd::Zero();
  r0(0, 0) = 1.0;
  pack(r0, x);
  std::vector<double> all = times;
  all.push_back(p.t_horizon);
  std::vector<State> samples;
  integrate_piecewise(p, x, start, all, tolerance, make_rhs, samples);

  MasterReference out;
  out.times = times;
  for (std::size_t k = 0; k < times.size(); ++k) out.states.push_back(unpack(samples[k]));
  out.emitted = samples.back()[32];
  out.scattered_sp = samples.back()[33];
  out.scattered_dp = samples.back()[34];
  return out;
}

NoJumpReference integrate_no_jump(const SourceParams& p, const std::vector<double>& times) {
  const double k2 = 2.0 * p.kappa;
  const double sp2 = 2.0 * p.gamma_sp;
  const double dp2 = 2.0 * p.gamma_dp;
  const auto make_rhs = [&](bool on) {
    Eigen::Matrix4cd heff = hamiltonian(p, on).cast<cd>();
    heff(1, 1) -= cd(0.0, 0.5 * k2);
    heff(2, 2) -= cd(0.0, 0.5 * (sp2 + dp2));
    return [heff, k2, sp2, dp2](const State& x, State& dxdt, double) {
      const Eigen::Matrix4cd r = unpack(x);
      const Eigen::Matrix4cd d =
          cd(0.0, -1.0) * (heff * r - r * heff.adjoint());
      pack(d, dxdt);
      dxdt[32] = k2 * r(1, 1).real() + (sp2 + dp2) * r(2, 2).real();
    };
  };
  State x(33, 0.0);
  Eigen::Matrix4cd r0 = Eigen::Matrix4cd::Zero();
  r0(0, 0) = 1.0;
  pack(r0, x);
  std::vector<State> samples;
  integrate_piecewise(p, x, 0.0, times, 1e-12, make_rhs, samples);
  NoJumpReference out;
  out.times = times;
  for (const auto& s : samples) {
    out.survival.push_back(unpack(s).trace().real());
    out.one_minus_jump_integral.push_back(1.0 - s[32]);
  }
  return out;
}

Eigen::MatrixXcd literal_kernel(const PhotonRecord& r) {
  const Eigen::Index n = static_cast<Eigen::Index>(r.grid.size);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    double w = r.scatter_rate[s] * r.grid.dt;
    if (s == 0) w += 1.0;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index t = s; t < n; ++t) psi(t) = r.psi(s, t);
    g.noalias() += w * psi * psi.adjoint();
  }
  return r.eta * g;
}

double literal_parallel(const PhotonRecord& a, const PhotonRecord& b,
                        const ImperfectionParams& imp, std::size_t i, std::size_t j) {
  const std::size_t n = a.grid.size;
  const double dt = a.grid.dt;
  const double tau = (static_cast<double>(i) - static_cast<double>(j)) * dt;
  const double f = std::exp(-0.5 * imp.tau_gen * imp.tau_gen * tau * tau * imp.sigma_drift *
                            imp.sigma_drift);
  const cd phase = std::polar(f, -imp.omega_offset * tau);
  auto weight = [&](const PhotonRecord& r, std::size_t s) {
    return r.eta * (r.scatter_rate[s] * dt + (s == 0 ? 1.0 : 0.0));
  };
  double total = 0.0;
  for (std::size_t sa = 0; sa < n; ++sa) {
    const double wa = weight(a, sa);
    if (wa == 0.0) continue;
    const cd a1 = a.psi(sa, i);
    const cd a2 = a.psi(sa, j);
    for (std::size_t sb = 0; sb < n; ++sb) {
      const double wb = weight(b, sb);
      if (wb == 0.0) continue;
      const cd b1 = b.psi(sb, i);
      const cd b2 = b.psi(sb, j);
      // 1/4 |a(t1) b(t2) - a(t2) b(t1)|^2 with the cross term dephased.
      const double direct = std::norm(a1 * b2) + std::norm(a2 * b1);
      const double cross = 2.0 * std::real(a1 * b2 * std::conj(a2 * b1) * phase);
      total += wa * wb * 0.25 * (direct - cross);
    }
  }
  return total;
}

JumpStatistics quantum_jumps(const SourceParams& p, std::uint64_t trajectories, std::uint64_t seed) {
  const double k2 = 2.0 * p.kappa;
  const double sp2 = 2.0 * p.gamma_sp;
  const double dp2 = 2.0 * p.gamma_dp;
  auto step_map = [&](bool on) {
    Eigen::Matrix3cd heff = hamiltonian(p, on).topLeftCorner<3, 3>();
    heff(1, 1) -= cd(0.0, 0.5 * k2);
    heff(2, 2) -= cd(0.0, 0.5 * (sp2 + dp2));
    return Eigen::Matrix3cd((cd(0.0, -1.0) * heff * p.dt).exp());
  };
  const Eigen::Matrix3cd on = step_map(true);
  const Eigen::Matrix3cd off = step_map(false);
  const std::size_t steps = static_cast<std::size_t>(std::llround(p.t_horizon / p.dt));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  JumpStatistics out;
  out.trajectories = trajectories;
  double sum_all = 0.0, sum2_all = 0.0, sum_em = 0.0, sum2_em = 0.0;
  for (std::uint64_t n = 0; n < trajectories; ++n) {
    Eigen::Vector3cd phi(1.0, 0.0, 0.0);
    double threshold = uni(rng);
    int jumps = 0;
    bool emitted = false;
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = (static_cast<double>(k) + 0.5) * p.dt;
      phi = (p.drive_on(t) ? on : off) * phi;
      if (phi.squaredNorm() >= threshold) continue;
      const double r1 = k2 * std::norm(phi(1));
      const double r2 = sp2 * std::norm(phi(2));
      const double r3 = dp2 * std::norm(phi(2));
      const double pick = uni(rng) * (r1 + r2 + r3);
      if (pick < r1) {
        emitted = true;
        break;
      }
      if (pick >= r1 + r2) break;
      ++jumps;
      phi = Eigen::Vector3cd(1.0, 0.0, 0.0);
      threshold = uni(rng);
    }
    sum_all += jumps;
    sum2_all += jumps * jumps;
    if (emitted) {
      ++out.emitted;
      sum_em += jumps;
      sum2_em += jumps * jumps;
    }
  }
  const double nt = static_cast<double>(trajectories);
  const double ne = static_cast<double>(out.emitted);
  out.mean_sp_jumps = sum_all / nt;
  out.stderr_all = std::sqrt((sum2_all / nt - out.mean_sp_jumps * out.mean_sp_jumps) / nt);
  if (ne > 0) {
    out.mean_sp_jumps_given_emission = sum_em / ne;
    out.stderr_given_emission =
        std::sqrt((sum2_em / ne - out.mean_sp_jumps_given_emission * out.mean_sp_jumps_given_emission) / ne);
  }
  return out;
}

}  // namespace homsim::oracle
