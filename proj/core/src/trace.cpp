// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/trace.hpp"

#include <cmath>

namespace cellmode {

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Stationary:
      return "stationary";
    case Mode::Walking:
      return "walking";
    case Mode::Driving:
      return "driving";
  }
  return "stationary";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
  for (Mode m : kAllModes) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Mode> Trace::label_at(TimestampMs t) const {
  for (const Segment& s : segments) {
    if (s.start_ms <= t && t <= s.end_ms) return s.mode;
  }
  return std::nullopt;
}

bool is_valid_cell_id(std::string_view id) noexcept {
  if (id.empty()) return false;
  return id.find_first_of(",\r\n") == std::string_view::npos;
}

std::vector<Violation> validate_trace(const Trace& trace) {
  std::vector<Violation> out;
  const auto& s = trace.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i].rss_dbm)) {
      out.push_back({Violation::Kind::NonFiniteRss, i, "non-finite RSS"});
    }
    if (!is_valid_cell_id(s[i].cell_id)) {
      out.push_back({Violation::Kind::InvalidCellId, i, "empty or malformed cell id"});
    }
    if (i > 0 && s[i].timestamp_ms <= s[i - 1].timestamp_ms) {
      out.push_back({Violation::Kind::NonIncreasingTimestamp, i,
                     "duplicate or non-increasing timestamp"});
    }
  }
  const auto& g = trace.segments;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].start_ms > g[i].end_ms) {
      out.push_back({Violation::Kind::InvalidSegment, i, "segment ends before it starts"});
    }
    if (i > 0 && g[i].start_ms <= g[i - 1].end_ms) {
      out.push_back({Violation::Kind::OverlappingSegments, i,
                     "segment overlaps or precedes its predecessor"});
    }
  }
  return out;
}

}  // namespace cellmode
