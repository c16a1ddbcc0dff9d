// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "cellmode/classifier.hpp"
#include "cellmode/eval.hpp"
#include "cellmode/features.hpp"
#include "cellmode/preprocess.hpp"
#include "cellmode/spectrum.hpp"
#include "cellmode/synth.hpp"

namespace {

using namespace cellmode;

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> g(-80.0, 5.0);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

void BM_Dft(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dft(x, 1.0));
}
// 64 is a power of two; the others take the chirp-z path.
BENCHMARK(BM_Dft)->Arg(10)->Arg(30)->Arg(60)->Arg(64)->Arg(600);

const std::vector<LabeledTrace>& suite() {
  static const std::vector<LabeledTrace> traces = [] {
    SuiteParams p;
    p.traces_per_mode = 10;
    return generate_suite(p);
  }();
  return traces;
}

const std::vector<FeatureVector>& instances() {
  static const std::vector<FeatureVector> out = [] {
    std::vector<FeatureVector> v;
    for (const auto& lt : suite()) {
      for (auto& inst : extract_instances(smooth_pingpong(lt.trace))) v.push_back(inst);
    }
    return v;
  }();
  return out;
}

void BM_Simulate(benchmark::State& state) {
  SuiteParams p;
  for (auto _ : state) benchmark::DoNotOptimize(generate_suite_trace(p, Mode::Driving, 0));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_Smooth(benchmark::State& state) {
  const Trace& t = suite().back().trace;
  for (auto _ : state) benchmark::DoNotOptimize(smooth_pingpong(t));
}
BENCHMARK(BM_Smooth)->Unit(benchmark::kMicrosecond);

void BM_ExtractInstances(benchmark::State& state) {
  const Trace t = smooth_pingpong(suite().back().trace);
  for (auto _ : state) benchmark::DoNotOptimize(extract_instances(t));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10);
}
BENCHMARK(BM_ExtractInstances)->Unit(benchmark::kMicrosecond);

void BM_Train(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(train(instances()));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * instances().size()));
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  const CrossValidationOptions opts{false, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(instances(), 5, {}, 0, opts));
}
BENCHMARK(BM_CrossValidate)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
