// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cellmode/trace.hpp"

namespace cellmode {

inline constexpr std::string_view kTraceHeader = "timestamp_ms,cell_id,rss_dbm,label";

/// Reads the CSV trace format. Consecutive rows with the same label become
/// one segment; unlabeled rows are left uncovered.
///
/// Throws ParseError (with the line number) for malformed rows and
/// ValidationError when the parsed trace breaks a Trace invariant.
Trace parse_trace(std::istream& in);

/// Writes the CSV trace format. RSS is printed with 6 significant digits.
/// Throws ValidationError if the trace is not well formed.
void write_trace(const Trace& trace, std::ostream& out);

Trace read_trace_file(const std::filesystem::path& path);
void write_trace_file(const Trace& trace, const std::filesystem::path& path);

/// Run-length coalescing of per-sample labels into segments.
std::vector<Segment> coalesce_labels(std::span<const Sample> samples,
                                     std::span<const std::optional<Mode>> labels);

}  // namespace cellmode
