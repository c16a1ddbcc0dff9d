// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/ingest.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cellmode/error.hpp"

namespace cellmode {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<Segment> coalesce_labels(std::span<const Sample> samples,
                                     std::span<const std::optional<Mode>> labels) {
  std::vector<Segment> segments;
  std::optional<Mode> open;
  for (std::size_t i = 0; i < samples.size() && i < labels.size(); ++i) {
    const auto& label = labels[i];
    if (label && open == label) {
      segments.back().end_ms = samples[i].timestamp_ms;
    } else if (label) {
      segments.push_back({samples[i].timestamp_ms, samples[i].timestamp_ms, *label});
    }
    open = label;
  }
  return segments;
}

Trace parse_trace(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing header");
  strip_cr(line);
  if (line != kTraceHeader) {
    throw ParseError(line_no, "expected header '" + std::string(kTraceHeader) + "'");
  }

  Trace trace;
  std::vector<std::optional<Mode>> labels;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 columns, got " + std::to_string(fields.size()));
    }
    Sample s;
    if (!parse_number(fields[0], s.timestamp_ms)) {
      throw ParseError(line_no, "bad timestamp '" + std::string(fields[0]) + "'");
    }
    s.cell_id = std::string(fields[1]);
    if (!parse_number(fields[2], s.rss_dbm)) {
      throw ParseError(line_no, "bad rss_dbm '" + std::string(fields[2]) + "'");
    }
    std::optional<Mode> label;
    if (!fields[3].empty()) {
      label = parse_mode(fields[3]);
      if (!label) throw ParseError(line_no, "unknown label '" + std::string(fields[3]) + "'");
    }
    trace.samples.push_back(std::move(s));
    labels.push_back(label);
  }
  trace.segments = coalesce_labels(trace.samples, labels);

  if (auto violations = validate_trace(trace); !violations.empty()) {
    const auto& v = violations.front();
    throw ValidationError(v.message + " at sample " + std::to_string(v.index));
  }
  return trace;
}

void write_trace(const Trace& trace, std::ostream& out) {
  if (auto violations = validate_trace(trace); !violations.empty()) {
    const auto& v = violations.front();
    throw ValidationError(v.message + " at index " + std::to_string(v.index));
  }
  out << kTraceHeader << '\n';
  std::size_t seg = 0;
  char rss[32];
  for (const Sample& s : trace.samples) {
    // Segments and samples are both sorted, so a single forward cursor suffices.
    while (seg < trace.segments.size() && trace.segments[seg].end_ms < s.timestamp_ms) ++seg;
    std::string_view label;
    if (seg < trace.segments.size() && trace.segments[seg].start_ms <= s.timestamp_ms) {
      label = to_string(trace.segments[seg].mode);
    }
    std::snprintf(rss, sizeof rss, "%.6g", s.rss_dbm);
    out << s.timestamp_ms << ',' << s.cell_id << ',' << rss << ',' << label << '\n';
  }
  if (!out) throw Error("failed writing trace");
}

Trace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_trace(in);
}

void write_trace_file(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create " + path.string());
  write_trace(trace, out);
}

}  // namespace cellmode
