// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "cellmode/error.hpp"

namespace cellmode {
namespace {

using u128 = unsigned __int128;

// sum_c count_c^2 / n kept as an exact fraction. Maximizing this over the
// children is the same as minimizing size-weighted Gini impurity.
struct Purity {
  u128 num = 0;
  u128 den = 1;

  friend bool operator>(const Purity& a, const Purity& b) { return a.num * b.den > b.num * a.den; }
};

std::uint64_t sum_sq(const ClassCounts& c) {
  std::uint64_t s = 0;
  for (auto x : c) s += x * x;
  return s;
}

std::uint64_t total(const ClassCounts& c) { return c[0] + c[1] + c[2]; }

Purity node_purity(const ClassCounts& c) { return {sum_sq(c), total(c)}; }

Purity split_purity(const ClassCounts& left, const ClassCounts& right) {
  const u128 nl = total(left);
  const u128 nr = total(right);
  return {u128(sum_sq(left)) * nr + u128(sum_sq(right)) * nl, nl * nr};
}

// A threshold t with lo <= t < hi, so `x <= t` separates the two values.
double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

class Builder {
 public:
  Builder(std::span<const FeatureVector> data, const TreeParams& params)
      : data_(data), params_(params), min_split_(params.effective_min_split()) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> idx(data_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    grow(idx, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    Purity purity;
  };

  ClassCounts count(const std::vector<std::size_t>& idx) const {
    ClassCounts c{};
    for (auto i : idx) ++c[index_of(*data_[i].label)];
    return c;
  }

  Split best_split(const std::vector<std::size_t>& idx, const ClassCounts& parent) const {
    Split best;
    const std::size_t n = idx.size();
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = data_[a].features[f];
        const double vb = data_[b].features[f];
        return va < vb || (va == vb && a < b);
      });
      ClassCounts left{};
      ClassCounts right = parent;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto cls = index_of(*data_[order[i]].label);
        ++left[cls];
        --right[cls];
        const double lo = data_[order[i]].features[f];
        const double hi = data_[order[i + 1]].features[f];
        if (!(lo < hi)) continue;
        const std::size_t nl = i + 1;
        if (nl < params_.min_leaf || n - nl < params_.min_leaf) continue;
        const Purity p = split_purity(left, right);
        if (!best.found || p > best.purity) {
          best = {true, f, midpoint(lo, hi), p};
        }
      }
    }
    return best;
  }

  std::size_t make_leaf(const ClassCounts& c) {
    TreeNode leaf;
    leaf.is_leaf = true;
    leaf.counts = c;
    leaf.prediction = majority(c);
    nodes_.push_back(leaf);
    return nodes_.size() - 1;
  }

  std::size_t grow(const std::vector<std::size_t>& idx, int depth) {
    const ClassCounts c = count(idx);
    const bool pure = std::count_if(c.begin(), c.end(), [](auto x) { return x > 0; }) <= 1;
    if (depth >= params_.max_depth || pure || idx.size() < min_split_) return make_leaf(c);

    const Split s = best_split(idx, c);
    if (!s.found || !(s.purity > node_purity(c))) return make_leaf(c);

    const std::size_t id = nodes_.size();
    TreeNode node;
    node.is_leaf = false;
    node.feature = s.feature;
    node.threshold = s.threshold;
    nodes_.push_back(node);

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      (data_[i].features[s.feature] <= s.threshold ? left : right).push_back(i);
    }
    const std::size_t l = grow(left, depth + 1);
    const std::size_t r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::span<const FeatureVector> data_;
  TreeParams params_;
  std::size_t min_split_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double gini_impurity(const ClassCounts& counts) {
  const auto n = total(counts);
  if (n == 0) throw DomainError("gini impurity of an empty node");
  double s = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    s += p * p;
  }
  return 1.0 - s;
}

Mode majority(const ClassCounts& counts) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kModeCount; ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return kAllModes[best];
}

void check_tree_params(const TreeParams& params) {
  if (params.max_depth < 1) throw DomainError("max_depth must be >= 1");
  if (params.min_leaf < 1) throw DomainError("min_leaf must be >= 1");
  if (params.effective_min_split() < 2) throw DomainError("min_split must be >= 2");
}

DecisionTree DecisionTree::from_nodes(std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw ModelLoadError("tree has no nodes");
  std::vector<int> seen(nodes.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t visited = 0;
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    ++visited;
    const TreeNode& n = nodes[id];
    if (n.is_leaf) continue;
    if (n.feature >= kFeatureCount) throw ModelLoadError("feature index out of range");
    if (!std::isfinite(n.threshold)) throw ModelLoadError("non-finite threshold");
    for (std::size_t child : {n.left, n.right}) {
      if (child >= nodes.size()) throw ModelLoadError("child index out of range");
      if (seen[child]++) throw ModelLoadError("node referenced twice");
      stack.push_back(child);
    }
  }
  if (visited != nodes.size()) throw ModelLoadError("unreachable nodes");
  for (TreeNode& n : nodes) {
    if (n.is_leaf) n.prediction = majority(n.counts);
  }
  return DecisionTree(std::move(nodes));
}

DecisionTree DecisionTree::single_leaf(const ClassCounts& counts) {
  TreeNode leaf;
  leaf.counts = counts;
  return from_nodes({leaf});
}

std::size_t DecisionTree::leaf_for(std::span<const double> x) const {
  if (x.size() != kFeatureCount) {
    throw DomainError("expected " + std::to_string(kFeatureCount) + " features, got " +
                      std::to_string(x.size()));
  }
  std::size_t id = 0;
  while (!nodes_[id].is_leaf) {
    const TreeNode& n = nodes_[id];
    id = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return id;
}

Mode DecisionTree::predict(std::span<const double> x) const {
  return nodes_[leaf_for(x)].prediction;
}

int DecisionTree::depth() const {
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[id].is_leaf) {
      stack.emplace_back(nodes_[id].left, d + 1);
      stack.emplace_back(nodes_[id].right, d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

DecisionTree train(std::span<const FeatureVector> instances, const TreeParams& params,
                   std::uint64_t /*seed*/) {
  check_tree_params(params);
  const std::size_t need = std::max(params.effective_min_split(), params.min_leaf);
  if (instances.size() < need) {
    throw TrainingError("need at least " + std::to_string(need) +
                        " instances to train, got " + std::to_string(instances.size()));
  }
  for (const auto& fv : instances) {
    if (!fv.label) throw TrainingError("training instance without a label");
  }
  return DecisionTree::from_nodes(Builder(instances, params).build());
}

void save_model(const DecisionTree& tree, std::ostream& out) {
  out << kModelHeader << '\n';
  char thr[40];
  const auto nodes = tree.nodes();
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const TreeNode& n = nodes[id];
    if (n.is_leaf) {
      out << "L " << id << ' ' << n.counts[0] << ' ' << n.counts[1] << ' ' << n.counts[2] << '\n';
    } else {
      std::snprintf(thr, sizeof thr, "%.17g", n.threshold);
      out << "N " << id << ' ' << n.feature << ' ' << thr << ' ' << n.left << ' ' << n.right
          << '\n';
    }
  }
  if (!out) throw Error("failed writing model");
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto j = line.find(' ', i);
    out.push_back(line.substr(i, j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

template <typename T>
T number(std::string_view t, std::size_t line_no) {
  T value{};
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (t.empty() || ec != std::errc{} || ptr != end) {
    throw ModelLoadError("line " + std::to_string(line_no) + ": bad number '" + std::string(t) +
                         "'");
  }
  return value;
}

}  // namespace

DecisionTree load_model(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // Every line, including the last, ends in '\n'; anything else is a
  // truncated write.
  if (text.empty() || text.back() != '\n') throw ModelLoadError("model file is truncated");

  std::vector<std::string_view> lines;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    lines.push_back(rest.substr(0, nl));
    rest.remove_prefix(nl + 1);
  }
  if (lines.front() != kModelHeader) {
    throw ModelLoadError("unsupported model header '" + std::string(lines.front()) + "'");
  }

  const std::size_t count = lines.size() - 1;
  std::vector<TreeNode> nodes(count);
  std::vector<bool> defined(count, false);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto tok = tokens(lines[li]);
    if (tok.size() != 6 && tok.size() != 5) throw ModelLoadError("malformed node line");
    const auto id = number<std::size_t>(tok[1], li + 1);
    if (id >= count || defined[id]) throw ModelLoadError("bad or duplicate node id");
    defined[id] = true;
    TreeNode& n = nodes[id];
    if (tok[0] == "N" && tok.size() == 6) {
      n.is_leaf = false;
      n.feature = number<std::size_t>(tok[2], li + 1);
      n.threshold = number<double>(tok[3], li + 1);
      n.left = number<std::size_t>(tok[4], li + 1);
      n.right = number<std::size_t>(tok[5], li + 1);
    } else if (tok[0] == "L" && tok.size() == 5) {
      n.is_leaf = true;
      for (std::size_t c = 0; c < kModeCount; ++c) {
        n.counts[c] = number<std::uint64_t>(tok[2 + c], li + 1);
      }
    } else {
      throw ModelLoadError("line " + std::to_string(li + 1) + ": unknown node record");
    }
  }
  return DecisionTree::from_nodes(std::move(nodes));
}

void save_model_file(const DecisionTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create " + path.string());
  save_model(tree, out);
}

DecisionTree load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_model(in);
}

}  // namespace cellmode
