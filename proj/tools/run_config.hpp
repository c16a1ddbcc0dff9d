// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cellmode/classifier.hpp"
#include "cellmode/features.hpp"
#include "cellmode/preprocess.hpp"
#include "cellmode/synth.hpp"

namespace cellmode::cli {

struct CrossValidationConfig {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  bool stratified = false;
};

/// Every tunable of the pipeline, loadable from JSON with --config.
struct RunConfig {
  SmoothingParams smoothing;
  ExtractionParams features;
  TreeParams tree;
  CrossValidationConfig cv;
  SuiteParams synth;
  std::size_t jobs = 1;
};

/// Throws cellmode::Error on unreadable files, unknown keys or wrong types,
/// and DomainError when the resulting config is invalid.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

/// Checks cross-module invariants (window nesting, tree and smoothing limits,
/// path loss parameters).
void check_run_config(const RunConfig& config);

std::string dump_run_config(const RunConfig& config);

}  // namespace cellmode::cli
