// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "cellmode/error.hpp"

namespace cellmode {
namespace {

std::optional<double> percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string fmt_percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f %%", *v);
  return buf;
}

void print_table(std::ostream& out, const std::string& title,
                 const std::array<std::array<std::string, kModeCount>, kModeCount>& cells) {
  char line[128];
  out << title << '\n';
  std::snprintf(line, sizeof line, "%-14s%-14s%-14s%-14s%s\n", "", "", "Predicted", "", "");
  out << line;
  std::snprintf(line, sizeof line, "%-14s%14s%14s%14s\n", "Ground truth", "Stationary", "Walking",
                "Driving");
  out << line;
  for (Mode truth : kAllModes) {
    const auto& row = cells[index_of(truth)];
    std::string name(to_string(truth));
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    std::snprintf(line, sizeof line, "%-14s%14s%14s%14s\n", name.c_str(), row[0].c_str(),
                  row[1].c_str(), row[2].c_str());
    out << line;
  }
  out << '\n';
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json per_class_json(const PerClass& values) {
  nlohmann::json j = nlohmann::json::object();
  for (Mode m : kAllModes) j[std::string(to_string(m))] = optional_json(values[index_of(m)]);
  return j;
}

nlohmann::json table_json(const PercentTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(optional_json(v));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(Mode truth) const {
  const auto& row = counts[index_of(truth)];
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::column_sum(Mode predicted) const {
  std::uint64_t s = 0;
  for (const auto& row : counts) s += row[index_of(predicted)];
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t r = 0; r < kModeCount; ++r) {
    for (std::size_t c = 0; c < kModeCount; ++c) counts[r][c] += other.counts[r][c];
  }
  return *this;
}

std::optional<double> macro_average(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

MetricsReport metrics(const ConfusionMatrix& matrix) {
  const std::uint64_t n = matrix.total();
  if (n == 0) throw DomainError("metrics of an empty confusion matrix");
  MetricsReport r;
  r.matrix = matrix;
  std::uint64_t diag = 0;
  for (Mode m : kAllModes) {
    const auto i = index_of(m);
    diag += matrix.at(m, m);
    r.precision[i] = percent(matrix.at(m, m), matrix.column_sum(m));
    r.recall[i] = percent(matrix.at(m, m), matrix.row_sum(m));
    for (Mode other : kAllModes) {
      const auto j = index_of(other);
      r.row_normalized[i][j] = percent(matrix.at(m, other), matrix.row_sum(m));
      r.column_normalized[i][j] = percent(matrix.at(m, other), matrix.column_sum(other));
    }
  }
  r.macro_precision = macro_average(r.precision);
  r.macro_recall = macro_average(r.recall);
  r.accuracy = 100.0 * static_cast<double>(diag) / static_cast<double>(n);
  return r;
}

std::vector<std::vector<std::size_t>> kfold_split(std::span<const FeatureVector> instances,
                                                  std::size_t k, std::uint64_t seed,
                                                  bool stratified) {
  if (k < 2) throw DomainError("k must be at least 2");
  if (instances.size() < k) {
    throw DomainError("cannot split " + std::to_string(instances.size()) + " instances into " +
                      std::to_string(k) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> groups;
  if (stratified) {
    groups.resize(kModeCount + 1);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& l = instances[i].label;
      groups[l ? index_of(*l) : kModeCount].push_back(i);
    }
  } else {
    groups.emplace_back(instances.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  }

  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& g : groups) {
    std::shuffle(g.begin(), g.end(), rng);
    for (auto i : g) folds[next++ % k].push_back(i);
  }
  return folds;
}

ConfusionMatrix evaluate(const DecisionTree& tree, std::span<const FeatureVector> instances) {
  ConfusionMatrix m;
  for (const auto& fv : instances) {
    if (!fv.label) continue;
    m.add(*fv.label, tree.predict(fv.features));
  }
  return m;
}

ConfusionMatrix cross_validate(std::span<const FeatureVector> instances, std::size_t k,
                               const TreeParams& params, std::uint64_t seed,
                               const CrossValidationOptions& options) {
  for (const auto& fv : instances) {
    if (!fv.label) throw TrainingError("cross-validation needs labeled instances");
  }
  const auto folds = kfold_split(instances, k, seed, options.stratified);

  auto run_fold = [&](std::size_t f) {
    std::vector<FeatureVector> train_set, test_set;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      auto& dst = g == f ? test_set : train_set;
      for (auto i : folds[g]) dst.push_back(instances[i]);
    }
    const DecisionTree tree = train(train_set, params, seed);
    return evaluate(tree, test_set);
  };

  std::vector<ConfusionMatrix> per_fold(folds.size());
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  for (std::size_t base = 0; base < folds.size(); base += jobs) {
    std::vector<std::future<ConfusionMatrix>> running;
    for (std::size_t f = base; f < std::min(folds.size(), base + jobs); ++f) {
      running.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                   run_fold, f));
    }
    for (std::size_t i = 0; i < running.size(); ++i) per_fold[base + i] = running[i].get();
  }

  ConfusionMatrix pooled;
  for (const auto& m : per_fold) pooled += m;
  return pooled;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

void render_report(const MetricsReport& r, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Json) {
    nlohmann::json j;
    j["counts"] = r.matrix.counts;
    j["total"] = r.matrix.total();
    j["precision"] = per_class_json(r.precision);
    j["recall"] = per_class_json(r.recall);
    j["macro_precision"] = optional_json(r.macro_precision);
    j["macro_recall"] = optional_json(r.macro_recall);
    j["accuracy"] = r.accuracy;
    j["row_normalized"] = table_json(r.row_normalized);
    j["column_normalized"] = table_json(r.column_normalized);
    out << j.dump(2) << '\n';
    return;
  }

  std::array<std::array<std::string, kModeCount>, kModeCount> cells;
  for (std::size_t i = 0; i < kModeCount; ++i) {
    for (std::size_t c = 0; c < kModeCount; ++c) cells[i][c] = std::to_string(r.matrix.counts[i][c]);
  }
  print_table(out, "Confusion matrix (counts)", cells);
  for (std::size_t i = 0; i < kModeCount; ++i) {
    for (std::size_t c = 0; c < kModeCount; ++c) cells[i][c] = fmt_percent(r.column_normalized[i][c]);
  }
  print_table(out, "Precision (column-normalized)", cells);
  for (std::size_t i = 0; i < kModeCount; ++i) {
    for (std::size_t c = 0; c < kModeCount; ++c) cells[i][c] = fmt_percent(r.row_normalized[i][c]);
  }
  print_table(out, "Recall (row-normalized)", cells);

  char line[128];
  for (Mode m : kAllModes) {
    std::snprintf(line, sizeof line, "%-12s precision %10s   recall %10s\n",
                  std::string(to_string(m)).c_str(), fmt_percent(r.precision[index_of(m)]).c_str(),
                  fmt_percent(r.recall[index_of(m)]).c_str());
    out << line;
  }
  out << "\nMacro precision: " << fmt_percent(r.macro_precision) << '\n';
  out << "Macro recall:    " << fmt_percent(r.macro_recall) << '\n';
  std::snprintf(line, sizeof line, "Accuracy:        %.2f %% (%llu instances)\n", r.accuracy,
                static_cast<unsigned long long>(r.matrix.total()));
  out << line;
}

ConfusionMatrix parse_report_counts(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("invalid JSON: ") + e.what());
  }
  ConfusionMatrix m;
  if (!j.contains("counts") || !j["counts"].is_array() || j["counts"].size() != kModeCount) {
    throw ParseError(1, "report JSON needs a 3x3 'counts' array");
  }
  for (std::size_t r = 0; r < kModeCount; ++r) {
    const auto& row = j["counts"][r];
    if (!row.is_array() || row.size() != kModeCount) throw ParseError(1, "counts row is not 3 wide");
    for (std::size_t c = 0; c < kModeCount; ++c) {
      if (!row[c].is_number_unsigned() && !(row[c].is_number_integer() && row[c].get<long long>() >= 0)) {
        throw ParseError(1, "counts must be non-negative integers");
      }
      m.counts[r][c] = row[c].get<std::uint64_t>();
    }
  }
  return m;
}

}  // namespace cellmode
