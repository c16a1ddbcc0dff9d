// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cellmode/error.hpp"
#include "cellmode/eval.hpp"

using namespace cellmode;

namespace {

std::vector<FeatureVector> labeled(std::size_t n) {
  std::vector<FeatureVector> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].features[0] = static_cast<double>(i);
    out[i].label = kAllModes[i % 3];
  }
  return out;
}

// Columns (or rows) of 10000 instances so a percentage with two decimals
// lands exactly on a count.
ConfusionMatrix with_precisions(double s, double w, double d) {
  ConfusionMatrix m;
  const double p[] = {s, w, d};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto hit = static_cast<std::uint64_t>(std::llround(p[c] * 100));
    m.counts[c][c] = hit;
    m.counts[(c + 1) % 3][c] = 10000 - hit;
  }
  return m;
}

ConfusionMatrix with_recalls(double s, double w, double d) {
  ConfusionMatrix m;
  const double r[] = {s, w, d};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto hit = static_cast<std::uint64_t>(std::llround(r[c] * 100));
    m.counts[c][c] = hit;
    m.counts[c][(c + 1) % 3] = 10000 - hit;
  }
  return m;
}

std::vector<std::size_t> sizes(const std::vector<std::vector<std::size_t>>& folds) {
  std::vector<std::size_t> out;
  for (const auto& f : folds) out.push_back(f.size());
  return out;
}

void check_partition(const std::vector<std::vector<std::size_t>>& folds, std::size_t n) {
  std::vector<std::size_t> all;
  for (const auto& f : folds) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end());
  REQUIRE(all.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
}

}  // namespace

TEST_CASE("kfold sizes") {
  CHECK(sizes(kfold_split(labeled(100), 5, 1)) == std::vector<std::size_t>(5, 20));
  CHECK(sizes(kfold_split(labeled(103), 5, 1)) ==
        std::vector<std::size_t>{21, 21, 21, 20, 20});
  CHECK(sizes(kfold_split(labeled(103), 5, 1, true)) ==
        std::vector<std::size_t>{21, 21, 21, 20, 20});
}

TEST_CASE("kfold is a seeded exact partition") {
  for (std::size_t n : {5u, 17u, 103u, 256u}) {
    for (std::uint64_t seed : {0u, 1u, 42u}) {
      for (bool stratified : {false, true}) {
        const auto folds = kfold_split(labeled(n), 5, seed, stratified);
        check_partition(folds, n);
        CHECK(folds == kfold_split(labeled(n), 5, seed, stratified));
      }
    }
  }
  CHECK(kfold_split(labeled(100), 5, 1) != kfold_split(labeled(100), 5, 2));
}

TEST_CASE("stratified folds balance classes") {
  const auto data = labeled(150);
  for (const auto& fold : kfold_split(data, 5, 3, true)) {
    std::array<int, 3> per{};
    for (std::size_t i : fold) ++per[index_of(*data[i].label)];
    CHECK(per == std::array<int, 3>{10, 10, 10});
  }
}

TEST_CASE("kfold preconditions") {
  CHECK_THROWS_AS(kfold_split(labeled(4), 5, 0), DomainError);
  CHECK_THROWS_AS(kfold_split(labeled(10), 1, 0), DomainError);
}

TEST_CASE("cross-validation on separable data is diagonal") {
  std::vector<FeatureVector> data(90);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i].label = kAllModes[i % 3];
    data[i].features[2] = 10.0 * static_cast<double>(i % 3) + 0.01 * static_cast<double>(i);
  }
  for (std::size_t jobs : {1u, 4u}) {
    const ConfusionMatrix m = cross_validate(data, 5, {}, 7, {false, jobs});
    CHECK(m.total() == 90);
    for (Mode t : kAllModes) {
      for (Mode p : kAllModes) CHECK(m.at(t, p) == (t == p ? 30u : 0u));
    }
  }
}

TEST_CASE("identical vectors with mixed labels fall back to the majority") {
  std::vector<FeatureVector> data(100);
  for (std::size_t i = 0; i < data.size(); ++i) data[i].label = i % 2 ? Mode::Walking : Mode::Driving;
  const ConfusionMatrix m = cross_validate(data, 5, {}, 11);
  CHECK(m.total() == 100);
  CHECK(m.row_sum(Mode::Stationary) == 0);
  CHECK(m.column_sum(Mode::Stationary) == 0);
  CHECK(m.at(Mode::Walking, Mode::Driving) + m.at(Mode::Driving, Mode::Walking) > 0);
  const double acc = metrics(m).accuracy;
  CHECK(acc >= 35.0);
  CHECK(acc <= 65.0);
}

TEST_CASE("cross-validation result does not depend on jobs") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::vector<FeatureVector> data(200);
  for (auto& v : data) {
    for (double& x : v.features) x = g(rng);
    v.label = v.features[0] + 0.5 * g(rng) > 0 ? Mode::Driving : Mode::Walking;
  }
  const ConfusionMatrix one = cross_validate(data, 5, {}, 3, {false, 1});
  CHECK(one.total() == 200);
  CHECK(cross_validate(data, 5, {}, 3, {false, 3}) == one);
  CHECK(cross_validate(data, 5, {}, 3, {false, 8}) == one);
}

TEST_CASE("macro averages of reference per-class tables") {
  const auto combined_p = metrics(with_precisions(99.23, 92.74, 75.82));
  CHECK(*combined_p.precision[0] == doctest::Approx(99.23));
  CHECK(*combined_p.macro_precision == doctest::Approx(89.26).epsilon(1e-4));
  CHECK(std::abs(*combined_p.macro_precision - 89.26) <= 0.01);

  const auto combined_r = metrics(with_recalls(100.00, 87.76, 81.76));
  CHECK(std::abs(*combined_r.macro_recall - 89.84) <= 0.01);

  const auto log_p = metrics(with_precisions(95.08, 89.64, 70.67));
  CHECK(std::abs(*log_p.macro_precision - 85.13) <= 0.01);
  const auto log_r = metrics(with_recalls(100.00, 79.11, 75.89));
  CHECK(std::abs(*log_r.macro_recall - 85.00) <= 0.01);
}

TEST_CASE("identity matrix is perfect") {
  ConfusionMatrix m;
  for (Mode c : kAllModes) m.add(c, c, 7);
  const auto r = metrics(m);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(*r.precision[c] == 100.0);
    CHECK(*r.recall[c] == 100.0);
    CHECK(*r.row_normalized[c][c] == 100.0);
  }
  CHECK(*r.macro_precision == 100.0);
  CHECK(r.accuracy == 100.0);
}

TEST_CASE("undefined classes are left out of the macro mean") {
  ConfusionMatrix m;
  m.add(Mode::Walking, Mode::Walking, 8);
  m.add(Mode::Walking, Mode::Driving, 2);
  m.add(Mode::Driving, Mode::Driving, 10);
  const auto r = metrics(m);
  CHECK_FALSE(r.precision[0]);
  CHECK_FALSE(r.recall[0]);
  CHECK_FALSE(r.row_normalized[0][0]);
  CHECK(*r.recall[1] == doctest::Approx(80.0));
  CHECK(*r.macro_recall == doctest::Approx(90.0));
  CHECK(*r.precision[2] == doctest::Approx(100.0 * 10 / 12));
  CHECK_THROWS_AS(metrics(ConfusionMatrix{}), DomainError);
  CHECK_FALSE(macro_average(std::vector<std::optional<double>>{std::nullopt}));
}

TEST_CASE("metric properties over random matrices") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> cell(0, 50);
  std::uniform_int_distribution<int> scale(2, 9);
  for (int trial = 0; trial < 300; ++trial) {
    ConfusionMatrix m;
    for (auto& row : m.counts) {
      for (auto& c : row) c = static_cast<std::uint64_t>(cell(rng));
    }
    if (m.total() == 0) continue;
    const auto r = metrics(m);

    // Normalized rows and columns sum to 100.
    for (std::size_t i = 0; i < 3; ++i) {
      if (!r.recall[i]) continue;
      double row = 0;
      for (std::size_t j = 0; j < 3; ++j) row += *r.row_normalized[i][j];
      CHECK(std::abs(row - 100.0) <= 0.01);
    }
    for (std::size_t j = 0; j < 3; ++j) {
      if (!r.precision[j]) continue;
      double col = 0;
      for (std::size_t i = 0; i < 3; ++i) col += *r.column_normalized[i][j];
      CHECK(std::abs(col - 100.0) <= 0.01);
    }

    // Accuracy lies between the extreme recalls.
    double lo = 100, hi = 0;
    for (const auto& v : r.recall) {
      if (!v) continue;
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
    CHECK(r.accuracy >= lo - 1e-9);
    CHECK(r.accuracy <= hi + 1e-9);

    // Scaling every count changes nothing.
    ConfusionMatrix scaled = m;
    const int k = scale(rng);
    for (auto& row : scaled.counts) {
      for (auto& c : row) c *= k;
    }
    const auto s = metrics(scaled);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(s.precision[c].has_value() == r.precision[c].has_value());
      if (r.precision[c]) CHECK(*s.precision[c] == doctest::Approx(*r.precision[c]));
      if (r.recall[c]) CHECK(*s.recall[c] == doctest::Approx(*r.recall[c]));
    }
    CHECK(s.accuracy == doctest::Approx(r.accuracy));
  }
}

TEST_CASE("evaluate counts every labeled instance") {
  const auto data = labeled(31);
  const ConfusionMatrix m = evaluate(DecisionTree::single_leaf({0, 0, 1}), data);
  CHECK(m.total() == 31);
  CHECK(m.column_sum(Mode::Driving) == 31);
}

TEST_CASE("text report") {
  std::ostringstream out;
  render_report(metrics(with_precisions(99.23, 92.74, 75.82)), ReportFormat::Text, out);
  CHECK(out.str().find("89.26") != std::string::npos);

  ConfusionMatrix diag;
  for (Mode c : kAllModes) diag.add(c, c, 4);
  std::ostringstream d;
  render_report(metrics(diag), ReportFormat::Text, d);
  CHECK(d.str().find("100.00") != std::string::npos);
  CHECK(d.str().find("stationary") != std::string::npos);
}

TEST_CASE("JSON report round-trips the counts") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<std::uint64_t> cell(0, 1u << 20);
  ConfusionMatrix m;
  for (auto& row : m.counts) {
    for (auto& c : row) c = cell(rng);
  }
  std::stringstream out;
  render_report(metrics(m), ReportFormat::Json, out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc.contains("macro_precision"));
  CHECK(doc.contains("macro_recall"));
  CHECK(doc.contains("precision"));
  CHECK(doc.contains("recall"));
  CHECK(parse_report_counts(out) == m);

  std::istringstream bad("{\"counts\": [[1,2],[3]]}");
  CHECK_THROWS_AS(parse_report_counts(bad), ParseError);
  CHECK(parse_report_format("json") == ReportFormat::Json);
  CHECK_FALSE(parse_report_format("xml"));
}
