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

#include "homsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "homsim/error.hpp"
#include "homsim/units.hpp"

namespace homsim {
namespace {

/// Re-raises `e` with the same category and `prefix` prepended.
[[noreturn]] void rethrow_with_context(const std::exception_ptr& e, const std::string& prefix) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& err) {
    throw ConfigError(prefix + err.what());
  } catch (const DomainError& err) {
    throw DomainError(prefix + err.what());
  } catch (const DataError& err) {
    throw DataError(prefix + err.what());
  } catch (const NumericError& err) {
    throw NumericError(prefix + err.what());
  }
}

std::string omega_context(double omega) {
  std::ostringstream os;
  os << "sweep point omega/2pi = " << std::setprecision(10) << units::to_mhz(omega) << " MHz ("
     << std::setprecision(17) << omega << " rad/us): ";
  return os.str();
}

bool qualifies(const SweepRow& r, Objective objective, double threshold) {
  if (!r.visibility) return false;
  return objective == Objective::kMaxPsuccAtV ? *r.visibility >= threshold : r.p_succ >= threshold;
}

double score(const SweepRow& r, Objective objective) {
  return objective == Objective::kMaxPsuccAtV ? r.p_succ : *r.visibility;
}

/// Best score over the windows of one omega, or nothing when no window
/// qualifies.
std::optional<SweepRow> best_for_omega(const SweepSpec& spec, double omega, double threshold) {
  const auto curve = evaluate_omega(spec, omega);
  std::optional<SweepRow> best;
  for (const auto& point : curve) {
    const SweepRow row{omega, point.window, point.visibility, point.p_succ};
    if (!qualifies(row, spec.objective, threshold)) continue;
    if (!best || score(row, spec.objective) > score(*best, spec.objective)) best = row;
  }
  return best;
}

}  // namespace

const char* objective_name(Objective o) {
  return o == Objective::kMaxVAtPsucc ? "max_V_at_Psucc" : "max_Psucc_at_V";
}

Objective parse_objective(const std::string& name) {
  if (name == "max_V_at_Psucc") return Objective::kMaxVAtPsucc;
  if (name == "max_Psucc_at_V") return Objective::kMaxPsuccAtV;
  throw ConfigError("unknown objective '" + name + "' (max_V_at_Psucc or max_Psucc_at_V)");
}

void SweepSpec::validate() const {
  if (omega_values.empty()) throw ConfigError("sweep: omega list is empty");
  if (window_values.empty()) throw ConfigError("sweep: window list is empty");
  for (double w : omega_values) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("sweep: omega values must be >= 0");
  }
  if (!(bin_width > 0.0)) throw ConfigError("sweep: bin width must be > 0");
  short_arm.validate();
  long_arm.validate();
  if (short_arm.grid() != long_arm.grid()) throw ConfigError("sweep: arms use different time grids");
  imperfections.validate();
  if (jobs == 0) throw ConfigError("sweep: jobs must be >= 1");
}

std::vector<VisibilityPoint> evaluate_omega(const SweepSpec& spec, double omega) {
  SourceParams s = spec.short_arm;
  SourceParams l = spec.long_arm;
  s.omega_drive = omega;
  l.omega_drive = omega;
  const PhotonRecord a = make_photon_record(s, spec.eta_short, spec.source_options);
  if (s == l && spec.eta_short == spec.eta_long) {
    return compute_coincidences(a, a, spec.imperfections, spec.bin_width, spec.window_values).curve;
  }
  const PhotonRecord b = make_photon_record(l, spec.eta_long, spec.source_options);
  return compute_coincidences(a, b, spec.imperfections, spec.bin_width, spec.window_values).curve;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t count = spec.omega_values.size();
  std::vector<std::vector<VisibilityPoint>> curves(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  const auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        curves[i] = evaluate_omega(spec, spec.omega_values[i]);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t threads = std::min(spec.jobs, count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) rethrow_with_context(errors[i], omega_context(spec.omega_values[i]));
  }
  std::vector<SweepRow> rows;
  rows.reserve(count * spec.window_values.size());
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& point : curves[i]) {
      rows.push_back({spec.omega_values[i], point.window, point.visibility, point.p_succ});
    }
  }
  return rows;
}

OptimumResult best_grid_point(std::span<const SweepRow> rows, Objective objective,
                              double threshold) {
  OptimumResult out;
  const SweepRow* best = nullptr;
  for (const auto& r : rows) {
    if (!qualifies(r, objective, threshold)) continue;
    if (!best || score(r, objective) > score(*best, objective)) best = &r;
  }
  if (!best) {
    std::ostringstream os;
    os << "no sweep point satisfies "
       << (objective == Objective::kMaxPsuccAtV ? "V >= " : "P_succ >= ") << threshold;
    out.reason = os.str();
    return out;
  }
  out.feasible = true;
  out.omega = best->omega;
  out.window = best->window;
  out.visibility = *best->visibility;
  out.p_succ = best->p_succ;
  return out;
}

OptimumResult find_optimal_omega(const SweepSpec& spec, double threshold) {
  const auto rows = run_sweep(spec);
  return find_optimal_omega(spec, rows, threshold);
}

OptimumResult find_optimal_omega(const SweepSpec& spec, std::span<const SweepRow> rows,
                                 double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("optimizer threshold must lie in [0, 1]");
  }
  OptimumResult best = best_grid_point(rows, spec.objective, threshold);
  if (!best.feasible || !spec.refine || spec.omega_values.size() < 2) return best;

  std::vector<double> grid = spec.omega_values;
  std::sort(grid.begin(), grid.end());
  const auto it = std::lower_bound(grid.begin(), grid.end(), best.omega);
  double lo = it == grid.begin() ? *it : *(it - 1);
  double hi = (it + 1) == grid.end() ? *it : *(it + 1);
  if (!(hi > lo)) return best;

  const auto evaluate = [&](double omega) -> std::optional<SweepRow> {
    try {
      return best_for_omega(spec, omega, threshold);
    } catch (...) {
      rethrow_with_context(std::current_exception(), omega_context(omega));
    }
  };
  const auto value = [&](const std::optional<SweepRow>& r) {
    return r ? score(*r, spec.objective) : -1.0;
  };
  const auto keep = [&](const std::optional<SweepRow>& r) {
    if (r && value(r) > (spec.objective == Objective::kMaxPsuccAtV ? best.p_succ : best.visibility)) {
      best.omega = r->omega;
      best.window = r->window;
      best.visibility = *r->visibility;
      best.p_succ = r->p_succ;
      best.refined = true;
    }
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  auto f1 = evaluate(x1);
  auto f2 = evaluate(x2);
  keep(f1);
  keep(f2);
  for (std::size_t iter = 0; iter < spec.refine_iterations; ++iter) {
    if (value(f1) >= value(f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = evaluate(x1);
      keep(f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = evaluate(x2);
      keep(f2);
    }
  }
  return best;
}

std::vector<FrontierPoint> frontier(std::span<const SweepRow> rows, double omega) {
  std::vector<FrontierPoint> out;
  for (const auto& r : rows) {
    if (r.omega == omega && r.visibility) out.push_back({r.p_succ, *r.visibility});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.p_succ < b.p_succ; });
  return out;
}

std::optional<double> interpolate_visibility(std::span<const FrontierPoint> curve, double p_succ) {
  if (curve.empty() || p_succ < curve.front().p_succ || p_succ > curve.back().p_succ) {
    return std::nullopt;
  }
  const auto it = std::lower_bound(curve.begin(), curve.end(), p_succ,
                                   [](const FrontierPoint& p, double x) { return p.p_succ < x; });
  if (it->p_succ == p_succ || it == curve.begin()) return it->visibility;
  const FrontierPoint& right = *it;
  const FrontierPoint& left = *(it - 1);
  const double w = (p_succ - left.p_succ) / (right.p_succ - left.p_succ);
  return left.visibility + w * (right.visibility - left.visibility);
}

DominanceReport compare_frontiers(std::span<const FrontierPoint> reference,
                                  std::span<const FrontierPoint> other, double v_floor,
                                  double tolerance) {
  DominanceReport out;
  bool any = false;
  const auto check = [&](double p) {
    const auto vr = interpolate_visibility(reference, p);
    const auto vo = interpolate_visibility(other, p);
    if (!vr || !vo || (*vr < v_floor && *vo < v_floor)) return;
    const double margin = *vr - *vo;
    ++out.points_compared;
    if (!any || margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_p_succ = p;
      any = true;
    }
  };
  for (const auto& p : reference) check(p.p_succ);
  for (const auto& p : other) check(p.p_succ);
  out.dominates = !any || out.worst_margin >= -tolerance;
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << std::setprecision(12);
  out << "omega_over_2pi_MHz,T_us,V,P_succ\n";
  for (const auto& r : rows) {
    out << units::to_mhz(r.omega) << ',' << r.window << ',';
    if (r.visibility) out << *r.visibility;
    out << ',' << r.p_succ << '\n';
  }
}

}  // namespace homsim
