// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

// Release gate: one PASS/FAIL line per acceptance criterion, followed by the
// measured figures. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cellmode/classifier.hpp"
#include "cellmode/eval.hpp"
#include "cellmode/features.hpp"
#include "cellmode/preprocess.hpp"
#include "cellmode/spectrum.hpp"
#include "cellmode/synth.hpp"
#include "oracles.hpp"

using namespace cellmode;
using namespace cellmode::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
    }
  }
  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Rows or columns of 10000 so that a two-decimal percentage is an exact count.
ConfusionMatrix matrix_with(const double (&pct)[3], bool columns) {
  ConfusionMatrix m;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto hit = static_cast<std::uint64_t>(std::llround(pct[c] * 100));
    m.counts[c][c] = hit;
    if (columns) {
      m.counts[(c + 1) % 3][c] = 10000 - hit;
    } else {
      m.counts[c][(c + 1) % 3] = 10000 - hit;
    }
  }
  return m;
}

Outcome reference_macro_averages() {
  Outcome o;
  auto check = [&](const char* name, const double (&pct)[3], bool precision, double want) {
    const MetricsReport r = metrics(matrix_with(pct, precision));
    const double got = precision ? *r.macro_precision : *r.macro_recall;
    o.require(std::abs(got - want) <= 0.01, name);
    o.note(std::string(name) + " " + fmt("%.4f", got));
  };
  check("combined precision", {99.23, 92.74, 75.82}, true, 89.26);
  check("combined recall", {100.00, 87.76, 81.76}, false, 89.84);
  check("log precision", {95.08, 89.64, 70.67}, true, 85.13);
  check("log recall", {100.00, 79.11, 75.89}, false, 85.00);
  return o;
}

Outcome synthetic_benchmark() {
  Outcome o;
  const SuiteParams suite;  // 30 per mode, 600 s, seed 42, 500 m, alpha 3, 6 dB, 4 dB
  std::vector<FeatureVector> instances;
  for (const auto& lt : generate_suite(suite)) {
    for (auto& inst : extract_instances(smooth_pingpong(lt.trace))) {
      if (inst.label) instances.push_back(inst);
    }
  }
  const ConfusionMatrix m = cross_validate(instances, 5, TreeParams{}, 0);
  const MetricsReport r = metrics(m);
  o.note("instances " + std::to_string(instances.size()));
  o.note("macro P " + fmt("%.2f", *r.macro_precision) + " R " + fmt("%.2f", *r.macro_recall));
  o.require(*r.macro_precision >= 85.0, "macro precision >= 85");
  o.require(*r.macro_recall >= 85.0, "macro recall >= 85");

  auto pair = [&](Mode a, Mode b) { return m.at(a, b) + m.at(b, a); };
  const auto sd = pair(Mode::Stationary, Mode::Driving);
  const auto sw = pair(Mode::Stationary, Mode::Walking);
  const auto wd = pair(Mode::Walking, Mode::Driving);
  o.note("confusion s-w " + std::to_string(sw) + " s-d " + std::to_string(sd) + " w-d " +
         std::to_string(wd));
  o.require(sd == 0, "zero stationary-driving confusion");
  o.require(wd >= sw && wd >= sd, "walking-driving carries the largest confusion");
  if (wd == sw) o.note("walking-driving ties stationary-walking");
  return o;
}

Outcome spectral_correctness() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-113.0, -51.0);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(n);
      for (double& v : x) v = u(rng);
      const auto got = fft(x);
      const auto want = naive_dft(x);
      for (std::size_t k = 0; k < n; ++k) {
        const double err = std::abs(got[k] - std::complex<double>(want[k]));
        // Bin 0 is ~n * 80 in magnitude, so the tolerance scales with it.
        worst = std::max(worst, err / (1.0 + std::abs(static_cast<double>(want[0].real()))));
      }
    }
  }
  o.require(worst <= 1e-9, "dft vs naive within 1e-9");
  o.note("dft worst relative error " + fmt("%.2e", worst));

  std::uniform_int_distribution<std::size_t> len(1, 64);
  double parseval = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> rss(len(rng));
    for (double& v : rss) v = u(rng);
    const Trace t = make_trace(std::vector<std::string>(rss.size(), "A"), rss);
    Window w{0, static_cast<TimestampMs>(rss.size()) * 1000, t.samples,
             static_cast<int>(rss.size()), true};
    const double ref = squared_deviation_sum(rss);
    parseval = std::max(parseval, std::abs(signal_energy(w, Scale::Logarithmic) - ref) / (1.0 + ref));
  }
  o.require(parseval <= 1e-9, "Parseval within 1e-9");
  o.note("Parseval worst relative error " + fmt("%.2e", parseval));
  return o;
}

Outcome feature_trends() {
  Outcome o;
  SuiteParams suite;
  suite.traces_per_mode = 10;
  suite.seed = 2024;
  std::array<std::array<double, kFeatureCount>, kModeCount> mean{};
  std::array<std::size_t, kModeCount> count{};
  for (const auto& lt : generate_suite(suite)) {
    for (const auto& inst : extract_instances(smooth_pingpong(lt.trace))) {
      for (std::size_t k = 0; k < kFeatureCount; ++k) mean[index_of(lt.mode)][k] += inst.features[k];
      ++count[index_of(lt.mode)];
    }
  }
  for (std::size_t m = 0; m < kModeCount; ++m) {
    o.require(count[m] >= 100, "at least 100 windows per mode");
    for (double& v : mean[m]) v /= static_cast<double>(count[m]);
  }
  std::size_t checked = 0;
  for (std::size_t win = 0; win < kWindowCount; ++win) {
    for (std::size_t scale = 0; scale < kScaleCount; ++scale) {
      for (auto base : {BaseFeature::UniqueCellCount, BaseFeature::RssVariance,
                        BaseFeature::AvgConsecutiveDiff, BaseFeature::SignalEnergy,
                        BaseFeature::AvgResidenceTime}) {
        const std::size_t k = feature_index(win, scale, static_cast<std::size_t>(base));
        const double s = mean[0][k], w = mean[1][k], d = mean[2][k];
        const bool ok = base == BaseFeature::AvgResidenceTime ? (s > w && w > d) : (d > w && w > s);
        o.require(ok, std::string(to_string(base)) + " window " + std::to_string(win) + " scale " +
                          std::to_string(scale));
        ++checked;
      }
    }
  }
  o.note(std::to_string(checked) + " orderings over " + std::to_string(count[0]) + "/" +
         std::to_string(count[1]) + "/" + std::to_string(count[2]) + " windows");
  const std::size_t uc = feature_index(0, 0, 0);
  o.note("10 s unique cells s/w/d " + fmt("%.3f", mean[0][uc]) + "/" + fmt("%.3f", mean[1][uc]) +
         "/" + fmt("%.3f", mean[2][uc]));
  return o;
}

Outcome smoothing_properties() {
  Outcome o;
  auto smoothed = [](const std::string& pattern, SmoothingParams p = {}) {
    std::string out;
    for (const auto& id : ids_of(smooth_pingpong(make_trace(expand(pattern), {}), p))) out += id;
    return out;
  };
  o.require(smoothed("AAABAAA") == "AAAAAAA", "AAABAAA");
  o.require(smoothed("AAABBAAA") == "AAAAAAAA", "AAABBAAA");
  o.require(smoothed("AAABBBAAA") == "AAABBBAAA", "AAABBBAAA");
  o.require(smoothed("AAABABAAA") == "AAAAAAAAA", "AAABABAAA");
  o.require(smoothed("AAABCCC") == "AAABCCC", "AAABCCC");
  o.require(smoothed("BAAAA") == "BAAAA", "BAAAA");

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(1, 200);
  std::uniform_int_distribution<std::size_t> alphabet(2, 4);
  std::size_t max_passes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Trace t = make_trace(random_ids(rng, len(rng), alphabet(rng)), {});
    const SmoothingResult r = smooth_pingpong_counted(t);
    bool ok = r.trace.samples.size() == t.samples.size() && r.passes <= t.samples.size();
    for (std::size_t i = 0; ok && i < t.samples.size(); ++i) {
      ok = r.trace.samples[i].timestamp_ms == t.samples[i].timestamp_ms &&
           r.trace.samples[i].rss_dbm == t.samples[i].rss_dbm;
    }
    ok = ok && smooth_pingpong(r.trace) == r.trace;
    if (!ok) {
      o.require(false, "randomized case " + std::to_string(trial));
      break;
    }
    max_passes = std::max(max_passes, r.passes);
  }
  o.note("1000 random traces, max passes " + std::to_string(max_passes));
  return o;
}

Outcome scale_conversion() {
  Outcome o;
  double round_trip = 0.0, ratio = 0.0;
  const double step = std::pow(10.0, -0.1);
  for (int i = 0; i <= 6200; ++i) {
    const double dbm = -113.0 + i * 0.01;
    round_trip = std::max(round_trip, std::abs(milliwatts_to_dbm(dbm_to_milliwatts(dbm)) - dbm));
  }
  for (int dbm = -113; dbm < -51; ++dbm) {
    const double r = dbm_to_milliwatts(dbm) / dbm_to_milliwatts(dbm + 1);
    ratio = std::max(ratio, std::abs(r - step));
  }
  o.require(round_trip < 1e-9, "round trip < 1e-9");
  o.require(ratio <= 1e-12, "per-dB ratio within 1e-12");
  o.note("round trip " + fmt("%.2e", round_trip) + ", ratio " + fmt("%.2e", ratio));
  return o;
}

std::vector<FeatureVector> random_instances(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<FeatureVector> out(n);
  for (auto& v : out) {
    for (double& x : v.features) x = g(rng);
    const double s = v.features[4] - v.features[20] + 0.4 * g(rng);
    v.label = s < -0.6 ? Mode::Stationary : s < 0.7 ? Mode::Walking : Mode::Driving;
  }
  return out;
}

std::string serialize(const DecisionTree& t) {
  std::ostringstream out;
  save_model(t, out);
  return out.str();
}

Outcome classifier_properties() {
  Outcome o;
  o.require(gini_impurity({10, 0, 0}) == 0.0, "gini (10,0,0)");
  o.require(gini_impurity({5, 5, 0}) == 0.5, "gini (5,5,0)");
  o.require(std::abs(gini_impurity({4, 4, 4}) - 2.0 / 3.0) <= 1e-15, "gini (4,4,4)");

  const auto data = random_instances(21, 600);
  const std::string first = serialize(train(data));
  bool same = true;
  for (int i = 0; i < 5; ++i) same = same && serialize(train(data)) == first;
  o.require(same, "byte-identical models");

  std::istringstream in(first);
  const DecisionTree loaded = load_model(in);
  const DecisionTree tree = train(data);
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g(0.0, 1.5);
  std::size_t agree = 0;
  for (int i = 0; i < 1000; ++i) {
    std::array<double, kFeatureCount> x{};
    for (double& v : x) v = g(rng);
    agree += loaded.predict(x) == tree.predict(x);
  }
  o.require(agree == 1000, "save/load prediction equivalence");

  auto transformed = data;
  for (auto& v : transformed) {
    for (double& x : v.features) x = std::exp(x / 3.0) + x * x * x;
  }
  const DecisionTree t2 = train(transformed);
  bool structure = tree.nodes().size() == t2.nodes().size();
  for (std::size_t i = 0; structure && i < tree.nodes().size(); ++i) {
    structure = tree.nodes()[i].is_leaf == t2.nodes()[i].is_leaf &&
                tree.nodes()[i].feature == t2.nodes()[i].feature;
  }
  for (std::size_t i = 0; structure && i < data.size(); ++i) {
    structure = tree.leaf_for(data[i].features) == t2.leaf_for(transformed[i].features);
  }
  o.require(structure, "monotone-transform structure stability");
  o.note(std::to_string(tree.nodes().size()) + " nodes, depth " + std::to_string(tree.depth()) +
         ", " + std::to_string(agree) + "/1000 agree");
  return o;
}

Outcome cv_mechanics() {
  Outcome o;
  const auto data = random_instances(31, 103);
  const auto folds = kfold_split(data, 5, 9);
  std::vector<int> seen(data.size(), 0);
  std::vector<std::size_t> sizes;
  for (const auto& f : folds) {
    sizes.push_back(f.size());
    for (std::size_t i : f) ++seen[i];
  }
  o.require(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }), "exact partition");
  o.require(sizes == std::vector<std::size_t>{21, 21, 21, 20, 20}, "size profile");
  const ConfusionMatrix m = cross_validate(data, 5, TreeParams{}, 9);
  o.require(m.total() == data.size(), "pooled total");
  o.note("sizes 21/21/21/20/20, pooled total " + std::to_string(m.total()));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 reference macro averages", reference_macro_averages},
      {"2 synthetic end-to-end benchmark", synthetic_benchmark},
      {"3 spectral correctness", spectral_correctness},
      {"4 feature trend suite", feature_trends},
      {"5 smoothing properties", smoothing_properties},
      {"6 scale conversion", scale_conversion},
      {"7 classifier properties", classifier_properties},
      {"8 cross-validation mechanics", cv_mechanics},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-34s %7.3f s  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
