// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cellmode/error.hpp"

namespace cellmode {
namespace {

constexpr std::uint64_t kTowerStream = 1;
constexpr std::uint64_t kPathStream = 2;
constexpr std::uint64_t kShadowStream = 3;

double distance(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_path_loss_params(const PathLossParams& p) {
  if (!(p.d0_m > 0.0)) throw DomainError("d0 must be positive");
  if (!(p.alpha > 0.0)) throw DomainError("alpha must be positive");
  if (!(p.shadow_sigma_db >= 0.0)) throw DomainError("shadow sigma must be non-negative");
  if (!(p.decorrelation_m > 0.0)) throw DomainError("decorrelation distance must be positive");
}

MobilityProfile default_profile(Mode mode) noexcept {
  switch (mode) {
    case Mode::Stationary:
      return {Mode::Stationary, 0.0, 0.0};
    case Mode::Walking:
      return {Mode::Walking, 3.0, 6.0};
    case Mode::Driving:
      return {Mode::Driving, 40.0, 100.0};
  }
  return {};
}

TowerField generate_towers(double extent_m, double spacing_m, double jitter_frac,
                           std::uint64_t seed) {
  if (!(spacing_m > 0.0) || !(extent_m > spacing_m)) {
    throw DomainError("tower grid needs extent > spacing > 0");
  }
  if (!(jitter_frac >= 0.0 && jitter_frac < 0.5)) throw DomainError("jitter must be in [0, 0.5)");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-jitter_frac * spacing_m, jitter_frac * spacing_m);
  const auto per_axis = static_cast<std::size_t>(std::floor(extent_m / spacing_m + 1e-9)) + 1;
  TowerField field;
  field.towers.reserve(per_axis * per_axis);
  for (std::size_t row = 0; row < per_axis; ++row) {
    for (std::size_t col = 0; col < per_axis; ++col) {
      Tower t;
      t.cell_id = std::to_string(1000 + field.towers.size());
      t.x_m = static_cast<double>(col) * spacing_m;
      t.y_m = static_cast<double>(row) * spacing_m;
      if (jitter_frac > 0.0) {
        t.x_m += jitter(rng);
        t.y_m += jitter(rng);
      }
      field.towers.push_back(std::move(t));
    }
  }
  return field;
}

Path generate_path(const MobilityProfile& profile, int duration_s, double extent_m,
                   std::uint64_t seed) {
  if (duration_s < 1) throw DomainError("duration must be at least 1 s");
  if (!(profile.min_kmh >= 0.0 && profile.min_kmh <= profile.max_kmh)) {
    throw DomainError("speed range must satisfy 0 <= min <= max");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, extent_m);
  std::uniform_real_distribution<double> speed_kmh(profile.min_kmh, profile.max_kmh);

  Path path;
  path.mode = profile.mode;
  path.points.reserve(static_cast<std::size_t>(duration_s));
  double x = coord(rng);
  double y = coord(rng);
  path.points.push_back({0.0, x, y});
  const bool moving = profile.max_kmh > 0.0;

  double wx = 0.0, wy = 0.0, speed = 0.0;
  auto next_leg = [&] {
    wx = coord(rng);
    wy = coord(rng);
    speed = speed_kmh(rng) / 3.6;
  };
  if (moving) next_leg();

  for (int t = 1; t < duration_s; ++t) {
    if (moving) {
      const double remaining = distance(x, y, wx, wy);
      if (remaining <= speed) {
        x = wx;
        y = wy;
        next_leg();
      } else {
        x += (wx - x) / remaining * speed;
        y += (wy - y) / remaining * speed;
      }
      x = std::clamp(x, 0.0, extent_m);
      y = std::clamp(y, 0.0, extent_m);
    }
    path.points.push_back({static_cast<double>(t), x, y});
  }
  return path;
}

double path_loss_dbm(double distance_m, const PathLossParams& params) {
  const double d = std::max(distance_m, params.d0_m);
  return params.p0_dbm - 10.0 * params.alpha * std::log10(d / params.d0_m);
}

Trace simulate_trace(const Path& path, const TowerField& field, const SimulationParams& params,
                     std::uint64_t seed) {
  check_path_loss_params(params.path_loss);
  if (path.points.empty() || field.towers.empty()) {
    throw DomainError("simulation needs a non-empty path and tower field");
  }
  const auto& pl = params.path_loss;
  const std::size_t n_towers = field.towers.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> shadow(n_towers);
  for (double& s : shadow) s = pl.shadow_sigma_db * gauss(rng);

  std::vector<double> power(n_towers);
  std::size_t serving = 0;
  Trace trace;
  trace.samples.reserve(path.points.size());

  for (std::size_t t = 0; t < path.points.size(); ++t) {
    const PathPoint& p = path.points[t];
    if (t > 0) {
      const PathPoint& prev = path.points[t - 1];
      const double rho = std::exp(-distance(p.x_m, p.y_m, prev.x_m, prev.y_m) / pl.decorrelation_m);
      const double innovation = pl.shadow_sigma_db * std::sqrt(std::max(0.0, 1.0 - rho * rho));
      for (double& s : shadow) s = rho * s + innovation * gauss(rng);
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < n_towers; ++i) {
      const Tower& tw = field.towers[i];
      power[i] = path_loss_dbm(distance(p.x_m, p.y_m, tw.x_m, tw.y_m), pl) + shadow[i];
      if (power[i] > power[best]) best = i;
    }
    if (t == 0) {
      serving = best;
    } else if (best != serving && power[best] > power[serving] &&
               power[best] - power[serving] >= params.hysteresis_db) {
      serving = best;
    }

    Sample s;
    s.timestamp_ms = params.start_ms + static_cast<TimestampMs>(std::llround(p.t_s * 1000.0));
    s.cell_id = field.towers[serving].cell_id;
    s.rss_dbm = std::clamp(std::round(power[serving]), kMinReportedRssDbm, kMaxReportedRssDbm);
    trace.samples.push_back(std::move(s));
  }
  trace.segments.push_back(
      {trace.samples.front().timestamp_ms, trace.samples.back().timestamp_ms, path.mode});
  return trace;
}

namespace {

LabeledTrace suite_member(const SuiteParams& params, const TowerField& field, Mode mode,
                          std::size_t index) {
  const std::uint64_t path_base = mix_seed(mix_seed(params.seed, kPathStream), index_of(mode));
  const std::uint64_t shadow_base = mix_seed(mix_seed(params.seed, kShadowStream), index_of(mode));
  const Path path = generate_path(default_profile(mode), params.duration_s, params.extent_m,
                                  mix_seed(path_base, index));
  return {mode, index, simulate_trace(path, field, params.simulation, mix_seed(shadow_base, index))};
}

TowerField suite_field(const SuiteParams& params) {
  return generate_towers(params.extent_m, params.spacing_m, params.jitter_frac,
                         mix_seed(params.seed, kTowerStream));
}

}  // namespace

std::vector<LabeledTrace> generate_suite(const SuiteParams& params) {
  const TowerField field = suite_field(params);
  std::vector<LabeledTrace> out;
  out.reserve(kModeCount * params.traces_per_mode);
  for (Mode mode : kAllModes) {
    for (std::size_t i = 0; i < params.traces_per_mode; ++i) {
      out.push_back(suite_member(params, field, mode, i));
    }
  }
  return out;
}

LabeledTrace generate_suite_trace(const SuiteParams& params, Mode mode, std::size_t index) {
  return suite_member(params, suite_field(params), mode, index);
}

}  // namespace cellmode
