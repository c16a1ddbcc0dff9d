// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/preprocess.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cellmode/error.hpp"

namespace cellmode {
namespace {

struct Run {
  std::string id;
  std::size_t length;
};

std::vector<Run> to_runs(const std::vector<Sample>& samples) {
  std::vector<Run> runs;
  for (const Sample& s : samples) {
    if (!runs.empty() && runs.back().id == s.cell_id) {
      ++runs.back().length;
    } else {
      runs.push_back({s.cell_id, 1});
    }
  }
  return runs;
}

// One left-to-right pass. Returns true if any excursion was absorbed.
bool absorb_excursions(std::vector<Run>& runs, const SmoothingParams& p) {
  bool changed = false;
  std::size_t i = 0;
  while (i < runs.size()) {
    if (runs[i].length < p.min_flank) {
      ++i;
      continue;
    }
    // Look for the next qualifying run with the same id, spending at most
    // max_gap foreign samples on the way.
    std::size_t foreign = 0;
    std::size_t j = i + 1;
    bool found = false;
    for (; j < runs.size(); ++j) {
      if (runs[j].id == runs[i].id) {
        if (runs[j].length >= p.min_flank) {
          found = true;
          break;
        }
        continue;
      }
      foreign += runs[j].length;
      if (foreign > p.max_gap) break;
    }
    if (!found || j == i + 1) {
      ++i;
      continue;
    }
    std::size_t merged = 0;
    for (std::size_t k = i; k <= j; ++k) merged += runs[k].length;
    runs[i].length = merged;
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i) + 1,
               runs.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    changed = true;
    // Stay on i: the merged run may flank the next excursion.
  }
  return changed;
}

}  // namespace

SmoothingResult smooth_pingpong_counted(const Trace& trace, const SmoothingParams& params) {
  if (params.max_gap < 1 || params.min_flank < 1) {
    throw DomainError("smoothing parameters must be >= 1");
  }
  SmoothingResult result{trace, 0};
  std::vector<Run> runs = to_runs(trace.samples);
  while (absorb_excursions(runs, params)) ++result.passes;

  std::size_t pos = 0;
  for (const Run& r : runs) {
    for (std::size_t k = 0; k < r.length; ++k) result.trace.samples[pos++].cell_id = r.id;
  }
  return result;
}

double dbm_to_milliwatts(double rss_dbm) noexcept { return std::pow(10.0, rss_dbm / 10.0); }

double milliwatts_to_dbm(double mw) {
  if (!(mw > 0.0)) throw DomainError("power must be positive");
  return 10.0 * std::log10(mw);
}

}  // namespace cellmode
