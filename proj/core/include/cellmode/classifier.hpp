// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cellmode/trace.hpp"

namespace cellmode {

using ClassCounts = std::array<std::uint64_t, kModeCount>;

/// 1 - sum p_i^2. Throws DomainError when every count is zero.
double gini_impurity(const ClassCounts& counts);

/// Majority class; ties go to the earlier Mode.
Mode majority(const ClassCounts& counts) noexcept;

struct TreeParams {
  int max_depth = 12;
  std::size_t min_leaf = 5;
  /// Defaults to 2 * min_leaf when unset.
  std::optional<std::size_t> min_split;

  std::size_t effective_min_split() const noexcept { return min_split.value_or(2 * min_leaf); }
};

/// Throws DomainError unless max_depth >= 1, min_leaf >= 1, min_split >= 2.
void check_tree_params(const TreeParams& params);

struct TreeNode {
  bool is_leaf = true;
  // Internal nodes: x[feature] <= threshold goes left.
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  // Leaves: training class counts and the majority vote.
  ClassCounts counts{};
  Mode prediction = Mode::Stationary;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary classification tree. Node 0 is the root.
class DecisionTree {
 public:
  /// Validates structure: every node reachable exactly once from the root,
  /// child indices in range, features < kFeatureCount, finite thresholds.
  /// Throws ModelLoadError on any breach.
  static DecisionTree from_nodes(std::vector<TreeNode> nodes);

  static DecisionTree single_leaf(const ClassCounts& counts);

  /// Throws DomainError unless x has exactly kFeatureCount entries.
  Mode predict(std::span<const double> x) const;

  /// Index of the leaf reached by x.
  std::size_t leaf_for(std::span<const double> x) const;

  /// Longest root-to-leaf path, in edges.
  int depth() const;
  std::size_t leaf_count() const;
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  std::vector<TreeNode> nodes_;
};

/// CART with Gini impurity over midpoint thresholds, no pruning.
///
/// Split candidates are compared exactly (as rationals over the class
/// counts), so ties resolve to the lowest feature index and then the lowest
/// threshold regardless of floating-point rounding. The seed is reserved;
/// training is fully deterministic.
///
/// Throws TrainingError for unlabeled instances or fewer than min_split.
DecisionTree train(std::span<const FeatureVector> instances, const TreeParams& params = {},
                   std::uint64_t seed = 0);

inline constexpr std::string_view kModelHeader = "cellmode-tree v1";

/// Text model format: header line, then `N id feature threshold left right`
/// or `L id n_stationary n_walking n_driving`, one node per line.
void save_model(const DecisionTree& tree, std::ostream& out);

/// Throws ModelLoadError on a bad header, malformed or truncated lines, or
/// a structurally invalid node set.
DecisionTree load_model(std::istream& in);

void save_model_file(const DecisionTree& tree, const std::filesystem::path& path);
DecisionTree load_model_file(const std::filesystem::path& path);

}  // namespace cellmode
