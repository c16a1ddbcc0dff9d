// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "cellmode/error.hpp"
#include "cellmode/preprocess.hpp"
#include "cellmode/spectrum.hpp"

namespace cellmode {
namespace {

constexpr double kSamplePeriodS = 1.0;
// Residual energy below this fraction of the raw signal energy counts as flat.
constexpr double kFlatEnergyRatio = 1e-12;
constexpr double kTieTolerance = 1e-9;

// Mean-removed copy. Exactly zero when all values are equal, so constant
// windows produce exact zeros downstream instead of rounding residue.
std::vector<double> centered(std::vector<double> v) {
  if (v.empty()) return v;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo == *hi) {
    std::fill(v.begin(), v.end(), 0.0);
    return v;
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
  return v;
}

double sum_of_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

std::string_view to_string(BaseFeature f) noexcept {
  switch (f) {
    case BaseFeature::UniqueCellCount:
      return "unique_cell_count";
    case BaseFeature::AvgResidenceTime:
      return "avg_residence_time";
    case BaseFeature::RssVariance:
      return "rss_variance";
    case BaseFeature::AvgConsecutiveDiff:
      return "avg_consecutive_diff";
    case BaseFeature::DominantFrequency:
      return "dominant_frequency";
    case BaseFeature::SignalEnergy:
      return "signal_energy";
  }
  return "";
}

std::size_t min_window_samples(int nominal_len_s, double coverage) {
  // The epsilon keeps 0.9 * 30 from rounding up to 28.
  return static_cast<std::size_t>(std::ceil(coverage * nominal_len_s - 1e-9));
}

std::vector<Window> windows_from(std::span<const Sample> samples, TimestampMs start_ms,
                                 int window_s, std::size_t count, double coverage) {
  std::vector<Window> out;
  out.reserve(count);
  const TimestampMs len_ms = static_cast<TimestampMs>(window_s) * 1000;
  const std::size_t need = min_window_samples(window_s, coverage);
  auto by_time = [](const Sample& s, TimestampMs t) { return s.timestamp_ms < t; };
  auto cursor = std::lower_bound(samples.begin(), samples.end(), start_ms, by_time);
  for (std::size_t i = 0; i < count; ++i) {
    Window w;
    w.start_ms = start_ms + static_cast<TimestampMs>(i) * len_ms;
    w.end_ms = w.start_ms + len_ms;
    w.nominal_len_s = window_s;
    auto last = std::lower_bound(cursor, samples.end(), w.end_ms, by_time);
    w.samples = std::span<const Sample>(cursor, last);
    w.valid = !w.samples.empty() && w.samples.size() >= need;
    out.push_back(w);
    cursor = last;
  }
  return out;
}

std::vector<Window> segment_windows(const Trace& trace, int window_s, double coverage) {
  if (trace.samples.empty() || window_s <= 0) return {};
  const TimestampMs first = trace.samples.front().timestamp_ms;
  const TimestampMs last = trace.samples.back().timestamp_ms;
  const TimestampMs len_ms = static_cast<TimestampMs>(window_s) * 1000;
  // A window is complete once the trace extends to its end, i.e. the last
  // sample lies at or beyond end_ms - 1 s at the nominal 1 Hz rate.
  const TimestampMs span_ms = last - first + 1000;
  const auto count = static_cast<std::size_t>(span_ms / len_ms);
  return windows_from(trace.samples, first, window_s, count, coverage);
}

std::vector<double> scaled_rss(const Window& w, Scale scale) {
  std::vector<double> v;
  v.reserve(w.samples.size());
  for (const Sample& s : w.samples) {
    v.push_back(scale == Scale::Linear ? dbm_to_milliwatts(s.rss_dbm) : s.rss_dbm);
  }
  return v;
}

std::size_t unique_cell_count(const Window& w) {
  std::unordered_set<std::string_view> ids;
  for (const Sample& s : w.samples) ids.insert(s.cell_id);
  return ids.size();
}

double avg_residence_time(const Window& w) {
  if (w.samples.empty()) return 0.0;
  double total = 0.0;
  std::size_t runs = 0;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= w.samples.size(); ++i) {
    if (i == w.samples.size() || w.samples[i].cell_id != w.samples[begin].cell_id) {
      const auto dwell_ms = w.samples[i - 1].timestamp_ms - w.samples[begin].timestamp_ms;
      total += static_cast<double>(dwell_ms) / 1000.0 + kSamplePeriodS;
      ++runs;
      begin = i;
    }
  }
  return total / static_cast<double>(runs);
}

double rss_variance(const Window& w, Scale scale) {
  if (w.samples.empty()) return 0.0;
  const auto dev = centered(scaled_rss(w, scale));
  return sum_of_squares(dev) / static_cast<double>(dev.size());
}

double avg_consecutive_diff(const Window& w, Scale scale) {
  if (w.samples.size() < 2) return 0.0;
  const auto v = scaled_rss(w, scale);
  double sum = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) sum += std::abs(v[i] - v[i - 1]);
  return sum / static_cast<double>(v.size() - 1);
}

double dominant_frequency(const Window& w, Scale scale) {
  if (w.samples.empty() || w.nominal_len_s <= 0) return 0.0;
  const auto raw = scaled_rss(w, scale);
  const auto dev = centered(raw);
  if (sum_of_squares(dev) <= kFlatEnergyRatio * sum_of_squares(raw)) return 0.0;

  const double rate = static_cast<double>(dev.size()) / w.nominal_len_s;
  const Spectrum spectrum = dft(dev, rate);
  const std::size_t top = dev.size() / 2;
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 1; k <= top; ++k) {
    // Magnitudes within rounding noise of the best count as ties, which
    // keep the lower frequency.
    if (spectrum.bin_magnitudes[k] > best_mag * (1.0 + kTieTolerance)) {
      best_mag = spectrum.bin_magnitudes[k];
      best = k;
    }
  }
  return spectrum.frequency_of(best);
}

double signal_energy(const Window& w, Scale scale) {
  if (w.samples.empty()) return 0.0;
  const auto dev = centered(scaled_rss(w, scale));
  const auto bins = fft(dev);
  double energy = 0.0;
  for (std::size_t k = 1; k < bins.size(); ++k) energy += std::norm(bins[k]);
  return energy / static_cast<double>(bins.size());
}

std::array<double, kBaseFeatureCount> base_features(const Window& w, Scale scale) {
  return {static_cast<double>(unique_cell_count(w)),
          avg_residence_time(w),
          rss_variance(w, scale),
          avg_consecutive_diff(w, scale),
          dominant_frequency(w, scale),
          signal_energy(w, scale)};
}

void check_extraction_params(const ExtractionParams& params) {
  const auto& ws = params.window_sizes_s;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws[i] <= 0) throw DomainError("window sizes must be positive");
    if (i > 0 && ws[i] <= ws[i - 1]) throw DomainError("window sizes must strictly increase");
    if (ws.back() % ws[i] != 0) {
      throw DomainError("window size " + std::to_string(ws[i]) + " does not divide " +
                        std::to_string(ws.back()));
    }
  }
  if (!(params.min_coverage > 0.0 && params.min_coverage <= 1.0)) {
    throw DomainError("min_coverage must be in (0, 1]");
  }
  if (!(params.label_agreement > 0.0 && params.label_agreement <= 1.0)) {
    throw DomainError("label_agreement must be in (0, 1]");
  }
}

std::vector<FeatureVector> extract_instances(const Trace& trace, const ExtractionParams& params) {
  check_extraction_params(params);
  const int macro_s = params.window_sizes_s.back();
  std::vector<FeatureVector> out;

  for (const Window& macro : segment_windows(trace, macro_s, params.min_coverage)) {
    if (!macro.valid) continue;
    FeatureVector fv;
    fv.window_start_ms = macro.start_ms;
    bool usable = true;

    for (std::size_t wi = 0; wi < kWindowCount && usable; ++wi) {
      const int len = params.window_sizes_s[wi];
      const auto count = static_cast<std::size_t>(macro_s / len);
      const auto subs = windows_from(macro.samples, macro.start_ms, len, count,
                                     params.min_coverage);
      if (!std::all_of(subs.begin(), subs.end(), [](const Window& w) { return w.valid; })) {
        usable = false;
        break;
      }
      for (Scale scale : kAllScales) {
        std::array<double, kBaseFeatureCount> acc{};
        for (const Window& w : subs) {
          const auto f = base_features(w, scale);
          for (std::size_t b = 0; b < kBaseFeatureCount; ++b) acc[b] += f[b];
        }
        for (std::size_t b = 0; b < kBaseFeatureCount; ++b) {
          fv.features[feature_index(wi, static_cast<std::size_t>(scale), b)] =
              acc[b] / static_cast<double>(subs.size());
        }
      }
    }
    if (!usable) continue;

    std::array<std::size_t, kModeCount> votes{};
    std::size_t labeled = 0;
    for (const Sample& s : macro.samples) {
      if (auto m = trace.label_at(s.timestamp_ms)) {
        ++votes[index_of(*m)];
        ++labeled;
      }
    }
    if (labeled > 0) {
      const auto top = std::max_element(votes.begin(), votes.end());
      if (static_cast<double>(*top) >= params.label_agreement * static_cast<double>(labeled)) {
        fv.label = kAllModes[static_cast<std::size_t>(top - votes.begin())];
      }
    }
    out.push_back(fv);
  }
  return out;
}

void write_instances(std::span<const FeatureVector> instances, std::ostream& out) {
  out << "window_start_ms";
  for (std::size_t i = 0; i < kFeatureCount; ++i) out << ",f" << i;
  out << ",label\n";
  char buf[40];
  for (const FeatureVector& fv : instances) {
    out << fv.window_start_ms;
    for (double x : fv.features) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ',' << buf;
    }
    out << ',' << (fv.label ? to_string(*fv.label) : std::string_view{}) << '\n';
  }
  if (!out) throw Error("failed writing instances");
}

std::vector<FeatureVector> parse_instances(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("window_start_ms,", 0) != 0) throw ParseError(line_no, "bad instance header");

  std::vector<FeatureVector> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != kFeatureCount + 2) {
      throw ParseError(line_no, "expected " + std::to_string(kFeatureCount + 2) + " columns");
    }
    FeatureVector fv;
    auto parse = [&](std::string_view t, auto& value) {
      const char* end = t.data() + t.size();
      auto [ptr, ec] = std::from_chars(t.data(), end, value);
      if (t.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(line_no, "bad number '" + std::string(t) + "'");
      }
    };
    parse(cols[0], fv.window_start_ms);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      parse(cols[i + 1], fv.features[i]);
      if (!std::isfinite(fv.features[i])) throw ParseError(line_no, "non-finite feature");
    }
    if (!cols.back().empty()) {
      fv.label = parse_mode(cols.back());
      if (!fv.label) throw ParseError(line_no, "unknown label '" + std::string(cols.back()) + "'");
    }
    out.push_back(fv);
  }
  return out;
}

std::vector<FeatureVector> read_instances_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_instances(in);
}

void write_instances_file(std::span<const FeatureVector> instances,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create " + path.string());
  write_instances(instances, out);
}

}  // namespace cellmode
