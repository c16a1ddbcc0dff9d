// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cellmode {

/// Transportation mode. The declaration order is the canonical iteration
/// and tie-breaking order everywhere in the library.
enum class Mode : std::uint8_t { Stationary = 0, Walking = 1, Driving = 2 };

inline constexpr std::size_t kModeCount = 3;
inline constexpr std::array<Mode, kModeCount> kAllModes = {Mode::Stationary, Mode::Walking,
                                                           Mode::Driving};

constexpr std::size_t index_of(Mode m) noexcept { return static_cast<std::size_t>(m); }

std::string_view to_string(Mode m) noexcept;

/// Exact, lowercase match only. Returns nullopt for anything else.
std::optional<Mode> parse_mode(std::string_view text) noexcept;

using TimestampMs = std::int64_t;

/// Serving cell identifiers are opaque; only equality is meaningful.
using CellId = std::string;

struct Sample {
  TimestampMs timestamp_ms = 0;
  CellId cell_id;
  double rss_dbm = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ground-truth annotation covering samples with start_ms <= t <= end_ms.
/// A segment produced from a single annotated row has start_ms == end_ms.
struct Segment {
  TimestampMs start_ms = 0;
  TimestampMs end_ms = 0;
  Mode mode = Mode::Stationary;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Trace {
  std::vector<Sample> samples;
  std::vector<Segment> segments;

  /// Ground-truth mode at a timestamp, if any segment covers it.
  std::optional<Mode> label_at(TimestampMs t) const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct Violation {
  enum class Kind {
    NonIncreasingTimestamp,
    NonFiniteRss,
    InvalidCellId,
    InvalidSegment,
    OverlappingSegments,
  };

  Kind kind;
  /// Sample index, or segment index for the segment kinds.
  std::size_t index;
  std::string message;
};

/// Returns one record per broken invariant. An empty result means the trace
/// is well formed.
std::vector<Violation> validate_trace(const Trace& trace);

/// Cell ids must be non-empty and free of CSV delimiters.
bool is_valid_cell_id(std::string_view id) noexcept;

inline constexpr std::size_t kScaleCount = 2;
inline constexpr std::size_t kBaseFeatureCount = 6;
inline constexpr std::size_t kWindowCount = 3;
inline constexpr std::size_t kFeatureCount = kWindowCount * kScaleCount * kBaseFeatureCount;

/// Position of a feature in the 36-wide vector: window outermost, then
/// scale, then the six base features.
constexpr std::size_t feature_index(std::size_t window, std::size_t scale,
                                    std::size_t base) noexcept {
  return (window * kScaleCount + scale) * kBaseFeatureCount + base;
}

struct FeatureVector {
  std::array<double, kFeatureCount> features{};
  std::optional<Mode> label;
  TimestampMs window_start_ms = 0;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

}  // namespace cellmode
