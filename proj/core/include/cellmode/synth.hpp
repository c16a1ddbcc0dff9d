// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cellmode/trace.hpp"

namespace cellmode {

/// Log-distance path loss with distance-correlated log-normal shadowing.
struct PathLossParams {
  double p0_dbm = -40.0;
  double d0_m = 1.0;
  double alpha = 3.0;
  double shadow_sigma_db = 6.0;
  double decorrelation_m = 50.0;
};

/// Throws DomainError unless d0 > 0, alpha > 0, sigma >= 0, decorrelation > 0.
void check_path_loss_params(const PathLossParams& params);

struct Tower {
  CellId cell_id;
  double x_m = 0.0;
  double y_m = 0.0;

  friend bool operator==(const Tower&, const Tower&) = default;
};

struct TowerField {
  std::vector<Tower> towers;

  friend bool operator==(const TowerField&, const TowerField&) = default;
};

struct MobilityProfile {
  Mode mode = Mode::Stationary;
  double min_kmh = 0.0;
  double max_kmh = 0.0;
};

/// Stationary (0, 0), walking (3, 6), driving (40, 100) km/h.
MobilityProfile default_profile(Mode mode) noexcept;

struct PathPoint {
  double t_s = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Path {
  Mode mode = Mode::Stationary;
  std::vector<PathPoint> points;
};

/// Square grid at `spacing_m` pitch over [0, extent_m]^2, each tower moved
/// by up to jitter_frac * spacing_m on each axis.
///
/// Throws DomainError unless extent > spacing > 0 and 0 <= jitter < 0.5.
TowerField generate_towers(double extent_m, double spacing_m, double jitter_frac,
                           std::uint64_t seed);

/// 1 Hz positions for duration_s seconds. Stationary profiles stay put;
/// moving profiles follow random waypoints with a fresh uniform speed per
/// leg. The step that reaches a waypoint ends there.
Path generate_path(const MobilityProfile& profile, int duration_s, double extent_m,
                   std::uint64_t seed);

/// p0 - 10 alpha log10(d / d0), with d clamped below at d0.
double path_loss_dbm(double distance_m, const PathLossParams& params);

inline constexpr double kMinReportedRssDbm = -113.0;
inline constexpr double kMaxReportedRssDbm = -51.0;

struct SimulationParams {
  PathLossParams path_loss;
  double hysteresis_db = 4.0;
  TimestampMs start_ms = 0;
};

/// Serving-cell trace along a path. Each tower's received power is the path
/// loss plus its own AR(1) shadowing process, whose step correlation is
/// exp(-distance moved / decorrelation). The phone camps on the strongest
/// tower and hands off only when another tower beats the server by at least
/// hysteresis_db. Reported RSS is rounded to whole dBm and clamped to
/// [-113, -51]. The trace carries one segment with the path's mode.
Trace simulate_trace(const Path& path, const TowerField& towers, const SimulationParams& params,
                     std::uint64_t seed);

struct SuiteParams {
  std::size_t traces_per_mode = 30;
  int duration_s = 600;
  std::uint64_t seed = 42;
  double extent_m = 2000.0;
  double spacing_m = 500.0;
  double jitter_frac = 0.2;
  SimulationParams simulation;
};

struct LabeledTrace {
  Mode mode;
  std::size_t index;
  Trace trace;
};

/// traces_per_mode traces for every mode over one shared tower field. Each
/// trace derives its own path and shadowing seeds from the suite seed.
std::vector<LabeledTrace> generate_suite(const SuiteParams& params);

/// The `index`-th trace of `mode` from generate_suite(params), built alone.
LabeledTrace generate_suite_trace(const SuiteParams& params, Mode mode, std::size_t index);

/// SplitMix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace cellmode
