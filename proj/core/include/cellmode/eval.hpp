// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellmode/classifier.hpp"
#include "cellmode/trace.hpp"

namespace cellmode {

/// Rows are ground truth, columns are predictions, both in Mode order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kModeCount>, kModeCount> counts{};

  void add(Mode truth, Mode predicted, std::uint64_t n = 1) {
    counts[index_of(truth)][index_of(predicted)] += n;
  }
  std::uint64_t at(Mode truth, Mode predicted) const {
    return counts[index_of(truth)][index_of(predicted)];
  }
  std::uint64_t total() const;
  std::uint64_t row_sum(Mode truth) const;
  std::uint64_t column_sum(Mode predicted) const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

using PerClass = std::array<std::optional<double>, kModeCount>;
using PercentTable = std::array<PerClass, kModeCount>;

/// All figures are percentages. A class whose denominator is zero has no
/// value and is left out of the macro average.
struct MetricsReport {
  ConfusionMatrix matrix;
  PerClass precision;
  PerClass recall;
  std::optional<double> macro_precision;
  std::optional<double> macro_recall;
  double accuracy = 0.0;
  /// Each row divided by its sum (recall layout).
  PercentTable row_normalized;
  /// Each column divided by its sum (precision layout).
  PercentTable column_normalized;
};

/// Unweighted mean over the defined entries; nullopt if none are defined.
std::optional<double> macro_average(std::span<const std::optional<double>> values);

/// Throws DomainError on an all-zero matrix.
MetricsReport metrics(const ConfusionMatrix& matrix);

/// Seeded shuffle followed by round-robin assignment, so fold sizes differ
/// by at most one. With `stratified`, each class is shuffled and dealt
/// separately, continuing the round-robin across classes.
///
/// Throws DomainError if k < 2 or there are fewer instances than folds.
std::vector<std::vector<std::size_t>> kfold_split(std::span<const FeatureVector> instances,
                                                  std::size_t k, std::uint64_t seed,
                                                  bool stratified = false);

struct CrossValidationOptions {
  bool stratified = false;
  /// Folds trained concurrently. The pooled result does not depend on it.
  std::size_t jobs = 1;
};

/// Pooled confusion matrix over all held-out folds.
ConfusionMatrix cross_validate(std::span<const FeatureVector> instances, std::size_t k,
                               const TreeParams& params, std::uint64_t seed,
                               const CrossValidationOptions& options = {});

/// Predictions of a fixed tree against labeled instances.
ConfusionMatrix evaluate(const DecisionTree& tree, std::span<const FeatureVector> instances);

enum class ReportFormat { Text, Json };

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;

void render_report(const MetricsReport& report, ReportFormat format, std::ostream& out);

/// Reads the `counts` member of a JSON report back into a matrix.
/// Throws ParseError on malformed input.
ConfusionMatrix parse_report_counts(std::istream& in);

}  // namespace cellmode
