// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cellmode/trace.hpp"

namespace cellmode {

enum class Scale : std::uint8_t { Logarithmic = 0, Linear = 1 };

inline constexpr std::array<Scale, kScaleCount> kAllScales = {Scale::Logarithmic, Scale::Linear};

/// The six per-window features, in vector order.
enum class BaseFeature : std::uint8_t {
  UniqueCellCount = 0,
  AvgResidenceTime = 1,
  RssVariance = 2,
  AvgConsecutiveDiff = 3,
  DominantFrequency = 4,
  SignalEnergy = 5,
};

std::string_view to_string(BaseFeature f) noexcept;

/// A tumbling window [start_ms, end_ms) over a trace. The samples span
/// borrows from the trace it was cut from.
struct Window {
  TimestampMs start_ms = 0;
  TimestampMs end_ms = 0;
  std::span<const Sample> samples;
  int nominal_len_s = 0;
  bool valid = false;
};

/// Minimum number of samples for a window of the given length at 1 Hz.
std::size_t min_window_samples(int nominal_len_s, double coverage = 0.9);

/// Back-to-back windows of window_s seconds starting at the first sample.
/// A trailing partial window is dropped. Windows with fewer samples than
/// min_window_samples are returned with valid == false.
std::vector<Window> segment_windows(const Trace& trace, int window_s, double coverage = 0.9);

/// `count` windows of window_s seconds starting at start_ms, cut from a
/// sorted sample range.
std::vector<Window> windows_from(std::span<const Sample> samples, TimestampMs start_ms,
                                 int window_s, std::size_t count, double coverage = 0.9);

/// RSS values of the window in the requested scale (dBm or mW).
std::vector<double> scaled_rss(const Window& w, Scale scale);

std::size_t unique_cell_count(const Window& w);
/// Mean dwell time in seconds over maximal same-cell runs; each run is
/// credited one extra nominal sample period of 1 s.
double avg_residence_time(const Window& w);
/// Population variance.
double rss_variance(const Window& w, Scale scale);
/// Mean absolute difference of consecutive values; 0 for fewer than 2 samples.
double avg_consecutive_diff(const Window& w, Scale scale);
/// Frequency of the strongest non-DC bin in 1..n/2 after mean removal, at
/// the effective rate n / nominal_len_s. Zero for a flat signal.
double dominant_frequency(const Window& w, Scale scale);
/// Sum of squared spectral magnitudes of the mean-removed series over bins
/// 1..n-1, divided by n.
double signal_energy(const Window& w, Scale scale);

std::array<double, kBaseFeatureCount> base_features(const Window& w, Scale scale);

struct ExtractionParams {
  /// Strictly increasing; each must divide the last, which is the
  /// macro-window length.
  std::array<int, kWindowCount> window_sizes_s = {10, 30, 60};
  double min_coverage = 0.9;
  /// Fraction of labeled samples that must agree for an instance label.
  double label_agreement = 0.8;
};

/// Throws DomainError if the window sizes do not nest.
void check_extraction_params(const ExtractionParams& params);

/// One instance per valid macro-window. Smaller-window features are averaged
/// over the sub-windows that tile the macro-window; a macro-window with any
/// invalid sub-window is skipped.
std::vector<FeatureVector> extract_instances(const Trace& trace,
                                             const ExtractionParams& params = {});

/// CSV: window_start_ms,f0..f35,label.
void write_instances(std::span<const FeatureVector> instances, std::ostream& out);
std::vector<FeatureVector> parse_instances(std::istream& in);

std::vector<FeatureVector> read_instances_file(const std::filesystem::path& path);
void write_instances_file(std::span<const FeatureVector> instances,
                          const std::filesystem::path& path);

}  // namespace cellmode
