// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "cellmode/trace.hpp"

namespace cellmode {

/// Ping-pong filter configuration, in samples.
struct SmoothingParams {
  std::size_t max_gap = 2;
  std::size_t min_flank = 3;
};

struct SmoothingResult {
  Trace trace;
  /// Number of left-to-right passes that changed something.
  std::size_t passes = 0;
};

/// Removes short excursions of the serving cell id.
///
/// A run of cell X with at least min_flank samples, followed by at most
/// max_gap samples from other cells, followed by another run of X with at
/// least min_flank samples, is rewritten so the excursion carries X. The
/// single-interloper case (X X X B X X X) is the common instance. Passes
/// repeat until nothing changes; flanks with different ids never merge.
/// Timestamps and RSS values are left untouched.
///
/// Throws DomainError if either parameter is zero.
SmoothingResult smooth_pingpong_counted(const Trace& trace, const SmoothingParams& params = {});

inline Trace smooth_pingpong(const Trace& trace, const SmoothingParams& params = {}) {
  return smooth_pingpong_counted(trace, params).trace;
}

/// 10^(dbm/10).
double dbm_to_milliwatts(double rss_dbm) noexcept;

/// 10*log10(mw). Throws DomainError for mw <= 0.
double milliwatts_to_dbm(double mw);

}  // namespace cellmode
