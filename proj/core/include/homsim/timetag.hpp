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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homsim/hom.hpp"
#include "homsim/photon_source.hpp"

namespace homsim {

enum class Channel : std::uint8_t { kTrig, kD1, kD2 };

const char* channel_name(Channel c);

struct TimeTagEvent {
  Channel channel = Channel::kTrig;
  std::uint64_t timestamp_ps = 0;

  bool operator==(const TimeTagEvent&) const = default;
};

/// Events ordered by timestamp (stable for equal timestamps).
struct TimeTagStream {
  std::vector<TimeTagEvent> events;

  std::size_t count(Channel c) const;
  bool operator==(const TimeTagStream&) const = default;
};

struct ParseOptions {
  /// Events may arrive up to this much earlier than the latest timestamp
  /// seen so far; anything older is rejected.
  std::uint64_t reorder_window_ps = 1'000'000;
};

/// Parses `channel,timestamp_ps` CSV. Blank lines and lines starting with
/// '#' are skipped; anything else that does not parse raises a DataError
/// naming `source` and the line number.
TimeTagStream parse_timetags(std::istream& in, const ParseOptions& options = {},
                             const std::string& source = "<stream>");
TimeTagStream parse_timetags_file(const std::filesystem::path& path,
                                  const ParseOptions& options = {});
void write_timetags(std::ostream& out, const TimeTagStream& stream);

/// Half-open interval [start, end) in us relative to the trigger.
struct GateWindow {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool contains(double t) const { return t >= start && t < end; }
};

struct GateSpec {
  GateWindow sync;
  GateWindow async_v;
  GateWindow async_h;
  double t_wait = 30.0;
  double bin = 0.125;
  /// Largest |tau| histogrammed; 0 means the sync window length.
  double max_tau = 0.0;
  /// Trial count k; 0 means one trial per trigger.
  std::uint64_t trials = 0;

  /// ConfigError unless the windows are non-empty, ordered and
  /// non-overlapping, t_wait > 0 and bin > 0.
  void validate() const;
  double tau_reach() const { return max_tau > 0.0 ? max_tau : sync.length(); }
};

/// Event counts in uniform bins starting at `origin`.
struct CountHistogram {
  double origin = 0.0;
  double bin = 0.0;
  std::vector<std::uint64_t> counts;

  double bin_center(std::size_t b) const { return origin + (static_cast<double>(b) + 0.5) * bin; }
  std::uint64_t total() const;
  /// Adds one count at x; returns false when x is out of range.
  bool add(double x);
};

struct HistogramSet {
  std::uint64_t trials = 0;
  std::uint64_t triggers = 0;
  /// Detector events outside every gate or before the first trigger.
  std::uint64_t unassigned_events = 0;
  double bin = 0.0;
  /// Singles of both detectors over the async_v and async_h windows,
  /// relative to each window start.
  CountHistogram singles_v;
  CountHistogram singles_h;
  /// tau = t(D2) - t(D1) in bins [k bin, (k + 1) bin).
  CountHistogram coinc_parallel;
  CountHistogram coinc_perp;
  /// The two async branches before folding: D1 early (tau near +t_wait)
  /// and D2 early (tau near -t_wait), both shifted to zero.
  CountHistogram coinc_perp_plus;
  CountHistogram coinc_perp_minus;
  /// Dark-count rate per detector (1/s) removed from the singles densities.
  double dark_rate_subtracted = 0.0;

  /// Counts / (k * bin) and sqrt(counts) / (k * bin).
  std::vector<double> density(const CountHistogram& h) const;
  std::vector<double> sigma(const CountHistogram& h) const;
  /// Singles densities with the dark subtraction applied, clamped at zero.
  std::vector<double> singles_density(const CountHistogram& h) const;

  /// Adds the counts of another shard built with the same gates.
  void merge(const HistogramSet& other);
};

/// Frames events by trigger, fills the sync and folded async coincidence
/// histograms and the async singles. Triggers are split into `shards`
/// contiguous groups that are histogrammed separately and merged; the
/// result does not depend on the shard count.
HistogramSet build_histograms(const TimeTagStream& stream, const GateSpec& gates,
                              std::size_t shards = 1);

/// Sets the dark-count correction applied by singles_density.
void subtract_dark(HistogramSet& h, double dark_rate_per_s);

struct ExperimentalVisibility {
  double window = 0.0;
  double c_parallel = 0.0;
  double c_perp = 0.0;
  std::uint64_t n_parallel = 0;
  std::uint64_t n_perp = 0;
  std::optional<double> visibility;
  std::optional<double> sigma;
};

/// V(T) = (C_perp - C_par) / C_perp over tau in [-T, T) with first-order
/// Poisson error propagation. T must be a multiple of the bin.
std::vector<ExperimentalVisibility> experimental_visibility(const HistogramSet& h,
                                                            std::span<const double> windows);

void write_singles_csv(std::ostream& out, const HistogramSet& h);
void write_histogram_csv(std::ostream& out, const HistogramSet& h);
void write_experimental_visibility_csv(std::ostream& out,
                                       std::span<const ExperimentalVisibility> rows);

/// Sequence timing of the synthetic experiment, in us relative to each
/// trigger.
struct SyntheticTiming {
  double trigger_period = 250.0;
  /// Delay-line offset of the synchronous pair.
  double delay_line = 13.35;
  /// Start of the asynchronous generation sequence.
  double async_start = 88.75;
  double t_wait = 30.0;
  /// Timestamp of the first trigger.
  std::uint64_t first_trigger_ps = 1'000'000;

  bool operator==(const SyntheticTiming&) const = default;
};

/// Gates matching a synthetic run whose photons occupy [0, photon_window).
GateSpec synthetic_gates(const SyntheticTiming& timing, double photon_window, double bin);

/// Draws per-trial detector clicks for a synchronous (interfering) pair and
/// an asynchronous (t_wait-separated) pair. `a` travels the direct path and
/// `b` the delay line. Deterministic for a fixed seed.
TimeTagStream sample_synthetic(const PhotonRecord& a, const PhotonRecord& b,
                               const ImperfectionParams& imp, std::uint64_t trials,
                               std::uint64_t seed, const SyntheticTiming& timing = {});

}  // namespace homsim
