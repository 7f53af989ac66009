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

#include "homsim/hom.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "homsim/error.hpp"

namespace homsim {
namespace {

constexpr double kWindowTolerance = 1e-9;

void require_same_grid(const PhotonRecord& a, const PhotonRecord& b) {
  if (a.grid != b.grid || a.kernel.rows() != static_cast<Eigen::Index>(a.grid.size) ||
      b.kernel.rows() != static_cast<Eigen::Index>(b.grid.size)) {
    throw ConfigError("coincidence: photon records are not on a shared time grid");
  }
}

std::vector<double> lag_marginal(const Eigen::MatrixXd& joint, double dt) {
  const long n = joint.rows();
  std::vector<double> lag(static_cast<std::size_t>(2 * n - 1), 0.0);
  for (long m = -(n - 1); m <= n - 1; ++m) {
    double sum = 0.0;
    for (long j = std::max(0L, -m); j < std::min(n, n - m); ++j) sum += joint(j + m, j);
    lag[static_cast<std::size_t>(m + n - 1)] = sum * dt;
  }
  return lag;
}

long window_bins(const TauHistogram& h, double window) {
  if (!(window >= 0.0) || h.bin_width <= 0.0) {
    throw DomainError("visibility: window must be >= 0 with a positive bin width");
  }
  const double ratio = window / h.bin_width;
  const long bins = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(bins)) > kWindowTolerance * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "window T = " << window << " us is not a multiple of the bin width " << h.bin_width
       << " us";
    throw DomainError(os.str());
  }
  if (bins > h.half_bins) {
    std::ostringstream os;
    os << "window T = " << window << " us exceeds the binned delay range "
       << h.half_bins * h.bin_width << " us";
    throw DomainError(os.str());
  }
  return bins;
}

}  // namespace

void ImperfectionParams::validate() const {
  auto fail = [](const std::string& what) { throw DomainError("imperfections: " + what); };
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail("epsilon must lie in [0, 1]");
  if (!std::isfinite(omega_offset)) fail("omega_offset must be finite");
  if (!(sigma_drift >= 0.0) || !std::isfinite(sigma_drift)) fail("sigma_drift must be >= 0");
  if (!(tau_gen > 0.0) || !std::isfinite(tau_gen)) fail("tau_gen must be > 0");
  if (!(background_density >= 0.0) || !std::isfinite(background_density)) {
    fail("background_density must be >= 0");
  }
}

double drift_sigma(double sqrt_v, double t_bar) {
  if (!(t_bar > 0.0) || !(sqrt_v >= 0.0)) {
    throw DomainError("drift_sigma: need sqrt(v) >= 0 and t_bar > 0");
  }
  return sqrt_v / t_bar;
}

double CoincidenceDensity::at_lag(long m) const {
  const long n = static_cast<long>(grid.size);
  if (m <= -n || m >= n) return 0.0;
  return lag[static_cast<std::size_t>(m + n - 1)];
}

double CoincidenceDensity::total() const {
  double sum = 0.0;
  for (double v : lag) sum += v;
  return sum * grid.dt;
}

double TauHistogram::integral(double window) const {
  const long bins = window_bins(*this, window);
  double sum = 0.0;
  for (long k = -bins; k < bins; ++k) sum += density[static_cast<std::size_t>(k + half_bins)];
  return sum * bin_width;
}

std::vector<double> single_click_density(const PhotonRecord& record) {
  std::vector<double> out(record.grid.size);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = 0.5 * record.kernel(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
  }
  return out;
}

CoincidenceDensity coincidence_orthogonal(const PhotonRecord& a, const PhotonRecord& b,
                                          double background_density, bool keep_joint) {
  require_same_grid(a, b);
  if (!(background_density >= 0.0)) throw DomainError("background density must be >= 0");
  const Eigen::Index n = static_cast<Eigen::Index>(a.grid.size);
  const Eigen::VectorXd da = a.kernel.diagonal().real();
  const Eigen::VectorXd db = b.kernel.diagonal().real();

  Eigen::MatrixXd joint(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) joint(i, j) = 0.25 * (da(i) * db(j) + da(j) * db(i));
  }
  CoincidenceDensity out;
  out.grid = a.grid;
  out.lag = lag_marginal(joint, a.grid.dt);
  out.background_density = background_density;
  if (keep_joint) out.joint = std::move(joint);
  return out;
}

CoincidenceDensity coincidence_parallel(const PhotonRecord& a, const PhotonRecord& b,
                                        const ImperfectionParams& imp, bool keep_joint) {
  require_same_grid(a, b);
  imp.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(a.grid.size);
  const double dt = a.grid.dt;
  const Eigen::VectorXd da = a.kernel.diagonal().real();
  const Eigen::VectorXd db = b.kernel.diagonal().real();

  // Offset phase and drift dephasing depend on t1 - t2 only.
  std::vector<cplx> lag_factor(static_cast<std::size_t>(2 * n - 1));
  const double dephase = 0.5 * imp.tau_gen * imp.tau_gen * imp.sigma_drift * imp.sigma_drift;
  for (Eigen::Index m = -(n - 1); m <= n - 1; ++m) {
    const double tau = static_cast<double>(m) * dt;
    const double f = std::exp(-dephase * tau * tau);
    lag_factor[static_cast<std::size_t>(m + n - 1)] = std::polar(f, -imp.omega_offset * tau);
  }

  const double keep = 1.0 - imp.epsilon;
  Eigen::MatrixXd joint(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double perp = 0.25 * (da(i) * db(j) + da(j) * db(i));
      const cplx cross = a.kernel(i, j) * std::conj(b.kernel(i, j)) *
                         lag_factor[static_cast<std::size_t>(i - j + n - 1)];
      const double interfering = perp - 0.5 * cross.real();
      joint(i, j) = keep * interfering + imp.epsilon * perp;
    }
  }
  CoincidenceDensity out;
  out.grid = a.grid;
  out.lag = lag_marginal(joint, dt);
  out.background_density = imp.background_density;
  if (keep_joint) out.joint = std::move(joint);
  return out;
}

TauHistogram bin_tau(const CoincidenceDensity& density, double bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("bin width must be > 0");
  const long n = static_cast<long>(density.grid.size);
  const double dt = density.grid.dt;
  const double reach = (static_cast<double>(n - 1) + 0.5) * dt;

  TauHistogram h;
  h.bin_width = bin_width;
  h.half_bins = std::max(1L, static_cast<long>(std::ceil(reach / bin_width - 1e-12)));
  h.density.assign(static_cast<std::size_t>(2 * h.half_bins), 0.0);

  for (long m = -(n - 1); m <= n - 1; ++m) {
    const double value = density.lag[static_cast<std::size_t>(m + n - 1)];
    if (value == 0.0) continue;
    const double lo = (static_cast<double>(m) - 0.5) * dt;
    const double hi = (static_cast<double>(m) + 0.5) * dt;
    long k = static_cast<long>(std::floor(lo / bin_width));
    for (; static_cast<double>(k) * bin_width < hi; ++k) {
      const double b0 = static_cast<double>(k) * bin_width;
      const double overlap = std::min(hi, b0 + bin_width) - std::max(lo, b0);
      if (overlap <= 0.0 || k < -h.half_bins || k >= h.half_bins) continue;
      h.density[static_cast<std::size_t>(k + h.half_bins)] += value * overlap;
    }
  }
  for (double& d : h.density) d = d / bin_width + density.background_density;
  return h;
}

std::vector<VisibilityPoint> visibility_curve(const TauHistogram& parallel,
                                              const TauHistogram& perp,
                                              std::span<const double> windows) {
  if (parallel.bin_width != perp.bin_width || parallel.half_bins != perp.half_bins) {
    throw ConfigError("visibility: densities use different tau binnings");
  }
  std::vector<VisibilityPoint> out;
  out.reserve(windows.size());
  for (double window : windows) {
    VisibilityPoint point;
    point.window = window;
    const double c_par = parallel.integral(window);
    const double c_perp = perp.integral(window);
    point.p_succ = c_perp;
    if (c_perp > 0.0) point.visibility = 1.0 - c_par / c_perp;
    out.push_back(point);
  }
  return out;
}

std::vector<double> window_ladder(double bin_width, double max_window) {
  std::vector<double> out;
  if (!(bin_width > 0.0)) throw DomainError("bin width must be > 0");
  const long count = static_cast<long>(std::floor(max_window / bin_width + 1e-9));
  for (long k = 1; k <= count; ++k) out.push_back(static_cast<double>(k) * bin_width);
  return out;
}

CoincidenceResult compute_coincidences(const PhotonRecord& a, const PhotonRecord& b,
                                       const ImperfectionParams& imp, double bin_width,
                                       std::span<const double> windows) {
  CoincidenceResult out;
  out.p_parallel = bin_tau(coincidence_parallel(a, b, imp, false), bin_width);
  out.p_perp = bin_tau(coincidence_orthogonal(a, b, imp.background_density, false), bin_width);
  out.curve = visibility_curve(out.p_parallel, out.p_perp, windows);
  return out;
}

void write_coincidence_csv(std::ostream& out, const CoincidenceResult& result) {
  out << std::setprecision(12);
  out << "tau_center_us,p_parallel_per_us,p_perp_per_us\n";
  for (std::size_t b = 0; b < result.p_perp.density.size(); ++b) {
    out << result.p_perp.bin_center(b) << ',' << result.p_parallel.density[b] << ','
        << result.p_perp.density[b] << '\n';
  }
}

void write_visibility_csv(std::ostream& out, std::span<const VisibilityPoint> curve) {
  out << std::setprecision(12);
  out << "T_us,V,P_succ\n";
  for (const auto& point : curve) {
    out << point.window << ',';
    if (point.visibility) out << *point.visibility;
    out << ',' << point.p_succ << '\n';
  }
}

}  // namespace homsim
