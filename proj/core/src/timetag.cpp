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

#include "homsim/timetag.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "homsim/error.hpp"
#include "homsim/units.hpp"

namespace homsim {
namespace {

constexpr const char* kHeader = "channel,timestamp_ps";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw DataError(os.str());
}

std::optional<Channel> parse_channel(std::string_view token) {
  if (token == "TRIG") return Channel::kTrig;
  if (token == "D1") return Channel::kD1;
  if (token == "D2") return Channel::kD2;
  return std::nullopt;
}

double to_us(std::int64_t ps) {
  return static_cast<double>(ps) / units::kPicosecondsPerMicrosecond;
}

CountHistogram make_tau_histogram(double reach, double bin) {
  const long half = std::max(1L, static_cast<long>(std::ceil(reach / bin - 1e-9)));
  CountHistogram h;
  h.origin = -static_cast<double>(half) * bin;
  h.bin = bin;
  h.counts.assign(static_cast<std::size_t>(2 * half), 0);
  return h;
}

CountHistogram make_time_histogram(double length, double bin) {
  CountHistogram h;
  h.origin = 0.0;
  h.bin = bin;
  h.counts.assign(static_cast<std::size_t>(std::max(1.0, std::ceil(length / bin - 1e-9))), 0);
  return h;
}

HistogramSet empty_set(const GateSpec& g) {
  HistogramSet h;
  h.bin = g.bin;
  h.singles_v = make_time_histogram(g.async_v.length(), g.bin);
  h.singles_h = make_time_histogram(g.async_h.length(), g.bin);
  h.coinc_parallel = make_tau_histogram(g.tau_reach(), g.bin);
  h.coinc_perp = h.coinc_parallel;
  h.coinc_perp_plus = h.coinc_parallel;
  h.coinc_perp_minus = h.coinc_parallel;
  return h;
}

struct Frame {
  std::vector<double> sync1, sync2, v1, v2, h1, h2;
  void clear() {
    for (auto* v : {&sync1, &sync2, &v1, &v2, &h1, &h2}) v->clear();
  }
};

void fill_frame(const Frame& f, const GateSpec& g, HistogramSet& out) {
  for (double t1 : f.sync1) {
    for (double t2 : f.sync2) out.coinc_parallel.add(t2 - t1);
  }
  for (double t1 : f.v1) {
    for (double t2 : f.h2) {
      const double tau = t2 - t1 - g.t_wait;
      out.coinc_perp.add(tau);
      out.coinc_perp_plus.add(tau);
    }
  }
  for (double t1 : f.h1) {
    for (double t2 : f.v2) {
      const double tau = t2 - t1 + g.t_wait;
      out.coinc_perp.add(tau);
      out.coinc_perp_minus.add(tau);
    }
  }
  for (const auto* v : {&f.v1, &f.v2}) {
    for (double t : *v) out.singles_v.add(t - g.async_v.start);
  }
  for (const auto* v : {&f.h1, &f.h2}) {
    for (double t : *v) out.singles_h.add(t - g.async_h.start);
  }
}

/// Histograms the frames of triggers [first, last) of `trig`.
HistogramSet build_shard(const TimeTagStream& s, const GateSpec& g,
                         const std::vector<std::size_t>& trig, std::size_t first,
                         std::size_t last) {
  HistogramSet out = empty_set(g);
  Frame frame;
  for (std::size_t k = first; k < last; ++k) {
    const std::size_t begin = trig[k];
    const std::size_t end = k + 1 < trig.size() ? trig[k + 1] : s.events.size();
    const std::uint64_t t0 = s.events[begin].timestamp_ps;
    frame.clear();
    ++out.triggers;
    for (std::size_t e = begin + 1; e < end; ++e) {
      const TimeTagEvent& ev = s.events[e];
      const double t = to_us(static_cast<std::int64_t>(ev.timestamp_ps - t0));
      const bool d1 = ev.channel == Channel::kD1;
      if (g.sync.contains(t)) {
        (d1 ? frame.sync1 : frame.sync2).push_back(t);
      } else if (g.async_v.contains(t)) {
        (d1 ? frame.v1 : frame.v2).push_back(t);
      } else if (g.async_h.contains(t)) {
        (d1 ? frame.h1 : frame.h2).push_back(t);
      } else {
        ++out.unassigned_events;
      }
    }
    fill_frame(frame, g, out);
  }
  return out;
}

void add_counts(CountHistogram& into, const CountHistogram& from) {
  if (into.counts.size() != from.counts.size() || into.bin != from.bin || into.origin != from.origin) {
    throw ConfigError("histogram merge: shards use different binnings");
  }
  for (std::size_t i = 0; i < into.counts.size(); ++i) into.counts[i] += from.counts[i];
}

long window_half_bins(const CountHistogram& h, double window) {
  const double ratio = window / h.bin;
  const long bins = std::lround(ratio);
  if (!(window >= 0.0) || std::abs(ratio - static_cast<double>(bins)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "window T = " << window << " us is not a multiple of the bin " << h.bin << " us";
    throw DomainError(os.str());
  }
  const long half = static_cast<long>(h.counts.size() / 2);
  if (bins > half) {
    std::ostringstream os;
    os << "window T = " << window << " us exceeds the histogrammed delay range "
       << static_cast<double>(half) * h.bin << " us";
    throw DomainError(os.str());
  }
  return bins;
}

std::uint64_t window_count(const CountHistogram& h, long bins) {
  const long half = static_cast<long>(h.counts.size() / 2);
  std::uint64_t n = 0;
  for (long k = half - bins; k < half + bins; ++k) n += h.counts[static_cast<std::size_t>(k)];
  return n;
}

// Sampling helpers.

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Cdf {
  std::vector<double> cumulative;
  double total = 0.0;

  std::size_t draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
  }
};

Cdf cdf_of(const double* w, std::size_t n) {
  Cdf c;
  c.cumulative.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += std::max(0.0, w[i]);
    c.cumulative[i] = sum;
  }
  c.total = sum;
  return c;
}

std::uint64_t stamp(std::uint64_t t0_ps, double t_us) {
  return t0_ps + static_cast<std::uint64_t>(std::llround(std::max(0.0, t_us) * units::kPicosecondsPerMicrosecond));
}

}  // namespace

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::kTrig:
      return "TRIG";
    case Channel::kD1:
      return "D1";
    case Channel::kD2:
      return "D2";
  }
  return "?";
}

std::size_t TimeTagStream::count(Channel c) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [c](const auto& e) { return e.channel == c; }));
}

TimeTagStream parse_timetags(std::istream& in, const ParseOptions& options,
                             const std::string& source) {
  TimeTagStream out;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  std::uint64_t latest = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = trim(raw);
    if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != kHeader) parse_fail(source, line, "expected header '" + std::string(kHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      parse_fail(source, line, "expected two comma-separated fields");
    }
    const std::string_view token = trim(text.substr(0, comma));
    const std::string_view number = trim(text.substr(comma + 1));
    const auto channel = parse_channel(token);
    if (!channel) parse_fail(source, line, "unknown channel '" + std::string(token) + "'");
    std::uint64_t ts = 0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), ts);
    if (number.empty() || ec != std::errc{} || ptr != number.data() + number.size()) {
      parse_fail(source, line, "invalid timestamp '" + std::string(number) + "'");
    }
    if (ts < latest && latest - ts > options.reorder_window_ps) {
      std::ostringstream os;
      os << "timestamp " << ts << " ps precedes " << latest
         << " ps by more than the reorder window of " << options.reorder_window_ps << " ps";
      parse_fail(source, line, os.str());
    }
    latest = std::max(latest, ts);
    out.events.push_back({*channel, ts});
  }
  if (in.bad()) throw DataError(source + ": read failure");
  if (!header_seen) throw DataError(source + ": missing header '" + std::string(kHeader) + "'");
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const auto& a, const auto& b) { return a.timestamp_ps < b.timestamp_ps; });
  return out;
}

TimeTagStream parse_timetags_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open time-tag file " + path.string());
  return parse_timetags(in, options, path.string());
}

void write_timetags(std::ostream& out, const TimeTagStream& stream) {
  out << kHeader << '\n';
  for (const auto& e : stream.events) out << channel_name(e.channel) << ',' << e.timestamp_ps << '\n';
}

void GateSpec::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("gates: " + what); };
  for (const GateWindow* w : {&sync, &async_v, &async_h}) {
    if (!(w->end > w->start) || !std::isfinite(w->start) || !std::isfinite(w->end)) {
      fail("every window needs start < end");
    }
  }
  if (!(sync.end <= async_v.start && async_v.end <= async_h.start)) {
    fail("windows must be ordered sync < async_v < async_h without overlap");
  }
  if (!(t_wait > 0.0)) fail("t_wait must be > 0");
  if (!(bin > 0.0)) fail("bin must be > 0");
  if (!(max_tau >= 0.0)) fail("max_tau must be >= 0");
}

std::uint64_t CountHistogram::total() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

bool CountHistogram::add(double x) {
  const double pos = std::floor((x - origin) / bin);
  if (!(pos >= 0.0) || pos >= static_cast<double>(counts.size())) return false;
  ++counts[static_cast<std::size_t>(pos)];
  return true;
}

std::vector<double> HistogramSet::density(const CountHistogram& h) const {
  std::vector<double> out(h.counts.size(), 0.0);
  if (trials == 0) return out;
  const double scale = 1.0 / (static_cast<double>(trials) * h.bin);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(h.counts[i]) * scale;
  return out;
}

std::vector<double> HistogramSet::sigma(const CountHistogram& h) const {
  std::vector<double> out(h.counts.size(), 0.0);
  if (trials == 0) return out;
  const double scale = 1.0 / (static_cast<double>(trials) * h.bin);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(static_cast<double>(h.counts[i])) * scale;
  }
  return out;
}

std::vector<double> HistogramSet::singles_density(const CountHistogram& h) const {
  std::vector<double> out = density(h);
  // Two detectors, rate in 1/s converted to 1/us.
  const double floor = 2.0 * dark_rate_subtracted * 1e-6;
  for (double& d : out) d = std::max(0.0, d - floor);
  return out;
}

void HistogramSet::merge(const HistogramSet& other) {
  if (bin != other.bin) throw ConfigError("histogram merge: shards use different bins");
  add_counts(singles_v, other.singles_v);
  add_counts(singles_h, other.singles_h);
  add_counts(coinc_parallel, other.coinc_parallel);
  add_counts(coinc_perp, other.coinc_perp);
  add_counts(coinc_perp_plus, other.coinc_perp_plus);
  add_counts(coinc_perp_minus, other.coinc_perp_minus);
  trials += other.trials;
  triggers += other.triggers;
  unassigned_events += other.unassigned_events;
}

HistogramSet build_histograms(const TimeTagStream& stream, const GateSpec& gates,
                              std::size_t shards) {
  gates.validate();
  std::vector<std::size_t> trig;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    if (stream.events[i].channel == Channel::kTrig) trig.push_back(i);
  }
  if (trig.empty()) throw DataError("time-tag stream contains no trigger events");

  shards = std::clamp<std::size_t>(shards, 1, trig.size());
  HistogramSet out = empty_set(gates);
  out.unassigned_events = trig.front();
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t first = trig.size() * s / shards;
    const std::size_t last = trig.size() * (s + 1) / shards;
    HistogramSet shard = build_shard(stream, gates, trig, first, last);
    shard.trials = 0;
    out.merge(shard);
  }
  out.trials = gates.trials > 0 ? gates.trials : out.triggers;
  return out;
}

void subtract_dark(HistogramSet& h, double dark_rate_per_s) {
  if (!(dark_rate_per_s >= 0.0)) throw DomainError("dark rate must be >= 0");
  h.dark_rate_subtracted = dark_rate_per_s;
}

std::vector<ExperimentalVisibility> experimental_visibility(const HistogramSet& h,
                                                            std::span<const double> windows) {
  std::vector<ExperimentalVisibility> out;
  out.reserve(windows.size());
  const double k = static_cast<double>(h.trials);
  for (double window : windows) {
    const long bins = window_half_bins(h.coinc_perp, window);
    ExperimentalVisibility row;
    row.window = window;
    row.n_parallel = window_count(h.coinc_parallel, bins);
    row.n_perp = window_count(h.coinc_perp, bins);
    if (k > 0.0) {
      row.c_parallel = static_cast<double>(row.n_parallel) / k;
      row.c_perp = static_cast<double>(row.n_perp) / k;
    }
    if (row.c_perp > 0.0) {
      const double a = row.c_parallel;
      const double b = row.c_perp;
      const double sa2 = static_cast<double>(row.n_parallel) / (k * k);
      const double sb2 = static_cast<double>(row.n_perp) / (k * k);
      row.visibility = 1.0 - a / b;
      row.sigma = std::sqrt(sa2 / (b * b) + a * a * sb2 / (b * b * b * b));
    }
    out.push_back(row);
  }
  return out;
}

void write_singles_csv(std::ostream& out, const HistogramSet& h) {
  const auto dv = h.singles_density(h.singles_v);
  const auto sv = h.sigma(h.singles_v);
  const auto dh = h.singles_density(h.singles_h);
  const auto sh = h.sigma(h.singles_h);
  out << std::setprecision(12);
  out << "t_us,rho_v_per_us,sigma_v_per_us,rho_h_per_us,sigma_h_per_us\n";
  const std::size_t n = std::max(dv.size(), dh.size());
  for (std::size_t b = 0; b < n; ++b) {
    out << h.singles_v.origin + (static_cast<double>(b) + 0.5) * h.bin << ',';
    if (b < dv.size()) out << dv[b] << ',' << sv[b];
    else out << ',';
    out << ',';
    if (b < dh.size()) out << dh[b] << ',' << sh[b];
    else out << ',';
    out << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const HistogramSet& h) {
  const auto dp = h.density(h.coinc_parallel);
  const auto sp = h.sigma(h.coinc_parallel);
  const auto dq = h.density(h.coinc_perp);
  const auto sq = h.sigma(h.coinc_perp);
  out << std::setprecision(12);
  out << "tau_center_us,p_parallel_per_us,sigma_parallel_per_us,p_perp_per_us,sigma_perp_per_us\n";
  for (std::size_t b = 0; b < dp.size(); ++b) {
    out << h.coinc_parallel.bin_center(b) << ',' << dp[b] << ',' << sp[b] << ',' << dq[b] << ','
        << sq[b] << '\n';
  }
}

void write_experimental_visibility_csv(std::ostream& out,
                                       std::span<const ExperimentalVisibility> rows) {
  out << std::setprecision(12);
  out << "T_us,V,sigma_V,C_parallel,C_perp,N_parallel,N_perp\n";
  for (const auto& r : rows) {
    out << r.window << ',';
    if (r.visibility) out << *r.visibility;
    out << ',';
    if (r.sigma) out << *r.sigma;
    out << ',' << r.c_parallel << ',' << r.c_perp << ',' << r.n_parallel << ',' << r.n_perp << '\n';
  }
}

GateSpec synthetic_gates(const SyntheticTiming& timing, double photon_window, double bin) {
  GateSpec g;
  const double dl = timing.delay_line;
  const double as = timing.async_start;
  g.sync = {dl, dl + photon_window};
  g.async_v = {as + dl, as + dl + photon_window};
  g.async_h = {as + dl + timing.t_wait, as + dl + timing.t_wait + photon_window};
  g.t_wait = timing.t_wait;
  g.bin = bin;
  g.validate();
  return g;
}

TimeTagStream sample_synthetic(const PhotonRecord& a, const PhotonRecord& b,
                               const ImperfectionParams& imp, std::uint64_t trials,
                               std::uint64_t seed, const SyntheticTiming& timing) {
  TimeTagStream out;
  if (trials == 0) return out;
  if (!(timing.trigger_period > 0.0)) throw ConfigError("sampler: trigger period must be > 0");

  const TimeGrid grid = a.grid;
  const std::size_t n = grid.size;
  const double dt = grid.dt;
  const double window = grid.horizon() + dt;
  const GateSpec gates = synthetic_gates(timing, window, 0.125);
  if (gates.async_h.end > timing.trigger_period) {
    throw ConfigError("sampler: trigger period shorter than the gated sequence");
  }

  const Eigen::VectorXd ga = a.kernel.diagonal().real();
  const Eigen::VectorXd gb = b.kernel.diagonal().real();
  const Cdf shape_a = cdf_of(ga.data(), n);
  const Cdf shape_b = cdf_of(gb.data(), n);
  const double pa = shape_a.total * dt;
  const double pb = shape_b.total * dt;

  const CoincidenceDensity par = coincidence_parallel(a, b, imp, true);
  const Cdf joint = cdf_of(par.joint.data(), static_cast<std::size_t>(par.joint.size()));
  const double p_coinc = joint.total * dt * dt;
  const double p_background = imp.background_density * 2.0 * window;

  if (pa > 1.0 + 1e-12 || pb > 1.0 + 1e-12 || p_coinc > pa * pb + 1e-12 || p_background > 1.0) {
    std::ostringstream os;
    os << "sampler: outcome probabilities exceed one (p_a = " << pa << ", p_b = " << pb
       << ", p_coinc = " << p_coinc << ", p_background = " << p_background << ")";
    throw ConfigError(os.str());
  }

  std::mt19937_64 rng(seed);
  const auto draw_time = [&](const Cdf& shape) {
    return grid.at(shape.draw(rng)) + uniform01(rng) * dt;
  };
  const auto detector = [&] { return uniform01(rng) < 0.5 ? Channel::kD1 : Channel::kD2; };

  std::vector<TimeTagEvent> trial;
  const std::uint64_t period_ps =
      static_cast<std::uint64_t>(std::llround(timing.trigger_period * units::kPicosecondsPerMicrosecond));
  const std::size_t rows = static_cast<std::size_t>(par.joint.rows());

  // Constant-density accidental coincidence within a window of length `window`.
  const auto background_pair = [&](double& t1, double& t2) {
    const double tau = (2.0 * uniform01(rng) - 1.0) * window;
    const double lo = std::max(0.0, -tau);
    const double hi = window - std::max(0.0, tau);
    t1 = lo + uniform01(rng) * (hi - lo);
    t2 = t1 + tau;
  };

  for (std::uint64_t k = 0; k < trials; ++k) {
    const std::uint64_t t0 = timing.first_trigger_ps + k * period_ps;
    trial.clear();
    trial.push_back({Channel::kTrig, t0});
    const double sync0 = timing.delay_line;
    const double v0 = timing.async_start + timing.delay_line;
    const double h0 = v0 + timing.t_wait;

    // Overlapped pair.
    const double u = uniform01(rng);
    if (u < p_coinc) {
      const std::size_t idx = joint.draw(rng);
      const std::size_t i = idx % rows;
      const std::size_t j = idx / rows;
      const double t1 = grid.at(i) + uniform01(rng) * dt;
      const double t2 = grid.at(j) + (t1 - grid.at(i)) + (uniform01(rng) - 0.5) * dt;
      trial.push_back({Channel::kD1, stamp(t0, sync0 + t1)});
      trial.push_back({Channel::kD2, stamp(t0, sync0 + t2)});
    } else if (u < pa * pb) {
      const double t = std::min(draw_time(shape_a), draw_time(shape_b));
      trial.push_back({detector(), stamp(t0, sync0 + t)});
    } else if (u < pa * pb + pa * (1.0 - pb)) {
      trial.push_back({detector(), stamp(t0, sync0 + draw_time(shape_a))});
    } else if (u < pa + pb - pa * pb) {
      trial.push_back({detector(), stamp(t0, sync0 + draw_time(shape_b))});
    }
    if (p_background > 0.0 && uniform01(rng) < p_background) {
      double t1 = 0.0, t2 = 0.0;
      background_pair(t1, t2);
      trial.push_back({Channel::kD1, stamp(t0, sync0 + t1)});
      trial.push_back({Channel::kD2, stamp(t0, sync0 + t2)});
    }

    // Time-displaced pair: b via the delay line into async_v, a directly into async_h.
    if (uniform01(rng) < pb) trial.push_back({detector(), stamp(t0, v0 + draw_time(shape_b))});
    if (uniform01(rng) < pa) trial.push_back({detector(), stamp(t0, h0 + draw_time(shape_a))});
    if (p_background > 0.0 && uniform01(rng) < p_background) {
      double t1 = 0.0, t2 = 0.0;
      background_pair(t1, t2);
      if (uniform01(rng) < 0.5) {
        trial.push_back({Channel::kD1, stamp(t0, v0 + t1)});
        trial.push_back({Channel::kD2, stamp(t0, h0 + t2)});
      } else {
        trial.push_back({Channel::kD2, stamp(t0, v0 + t1)});
        trial.push_back({Channel::kD1, stamp(t0, h0 + t2)});
      }
    }

    std::stable_sort(trial.begin() + 1, trial.end(),
                     [](const auto& x, const auto& y) { return x.timestamp_ps < y.timestamp_ps; });
    out.events.insert(out.events.end(), trial.begin(), trial.end());
  }
  return out;
}

}  // namespace homsim
