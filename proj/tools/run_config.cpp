// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cellmode/error.hpp"

namespace cellmode::cli {
namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw Error("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw Error("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  only_keys(root, "config", {"smoothing", "features", "tree", "cv", "synth", "jobs"});

  RunConfig cfg;
  read(root, "jobs", cfg.jobs);
  if (root.contains("smoothing")) {
    const auto& j = root["smoothing"];
    only_keys(j, "smoothing", {"max_gap", "min_flank"});
    read(j, "max_gap", cfg.smoothing.max_gap);
    read(j, "min_flank", cfg.smoothing.min_flank);
  }
  if (root.contains("features")) {
    const auto& j = root["features"];
    only_keys(j, "features", {"window_sizes_s", "min_coverage", "label_agreement"});
    read(j, "window_sizes_s", cfg.features.window_sizes_s);
    read(j, "min_coverage", cfg.features.min_coverage);
    read(j, "label_agreement", cfg.features.label_agreement);
  }
  if (root.contains("tree")) {
    const auto& j = root["tree"];
    only_keys(j, "tree", {"max_depth", "min_leaf", "min_split"});
    read(j, "max_depth", cfg.tree.max_depth);
    read(j, "min_leaf", cfg.tree.min_leaf);
    if (j.contains("min_split")) {
      std::size_t v = 0;
      read(j, "min_split", v);
      cfg.tree.min_split = v;
    }
  }
  if (root.contains("cv")) {
    const auto& j = root["cv"];
    only_keys(j, "cv", {"k", "seed", "stratified"});
    read(j, "k", cfg.cv.k);
    read(j, "seed", cfg.cv.seed);
    read(j, "stratified", cfg.cv.stratified);
  }
  if (root.contains("synth")) {
    const auto& j = root["synth"];
    only_keys(j, "synth",
              {"traces_per_mode", "duration_s", "seed", "extent_m", "spacing_m", "jitter_frac",
               "p0_dbm", "d0_m", "alpha", "shadow_sigma_db", "decorrelation_m", "hysteresis_db"});
    auto& s = cfg.synth;
    read(j, "traces_per_mode", s.traces_per_mode);
    read(j, "duration_s", s.duration_s);
    read(j, "seed", s.seed);
    read(j, "extent_m", s.extent_m);
    read(j, "spacing_m", s.spacing_m);
    read(j, "jitter_frac", s.jitter_frac);
    read(j, "p0_dbm", s.simulation.path_loss.p0_dbm);
    read(j, "d0_m", s.simulation.path_loss.d0_m);
    read(j, "alpha", s.simulation.path_loss.alpha);
    read(j, "shadow_sigma_db", s.simulation.path_loss.shadow_sigma_db);
    read(j, "decorrelation_m", s.simulation.path_loss.decorrelation_m);
    read(j, "hysteresis_db", s.simulation.hysteresis_db);
  }
  check_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void check_run_config(const RunConfig& c) {
  if (c.smoothing.max_gap < 1 || c.smoothing.min_flank < 1) {
    throw DomainError("smoothing parameters must be >= 1");
  }
  check_extraction_params(c.features);
  check_tree_params(c.tree);
  if (c.cv.k < 2) throw DomainError("k must be at least 2");
  check_path_loss_params(c.synth.simulation.path_loss);
  if (c.synth.duration_s < 1) throw DomainError("duration must be at least 1 s");
  if (c.jobs < 1) throw DomainError("jobs must be at least 1");
}

std::string dump_run_config(const RunConfig& c) {
  json j;
  j["jobs"] = c.jobs;
  j["smoothing"] = {{"max_gap", c.smoothing.max_gap}, {"min_flank", c.smoothing.min_flank}};
  j["features"] = {{"window_sizes_s", c.features.window_sizes_s},
                   {"min_coverage", c.features.min_coverage},
                   {"label_agreement", c.features.label_agreement}};
  j["tree"] = {{"max_depth", c.tree.max_depth},
               {"min_leaf", c.tree.min_leaf},
               {"min_split", c.tree.effective_min_split()}};
  j["cv"] = {{"k", c.cv.k}, {"seed", c.cv.seed}, {"stratified", c.cv.stratified}};
  const auto& s = c.synth;
  const auto& pl = s.simulation.path_loss;
  j["synth"] = {{"traces_per_mode", s.traces_per_mode},
                {"duration_s", s.duration_s},
                {"seed", s.seed},
                {"extent_m", s.extent_m},
                {"spacing_m", s.spacing_m},
                {"jitter_frac", s.jitter_frac},
                {"p0_dbm", pl.p0_dbm},
                {"d0_m", pl.d0_m},
                {"alpha", pl.alpha},
                {"shadow_sigma_db", pl.shadow_sigma_db},
                {"decorrelation_m", pl.decorrelation_m},
                {"hysteresis_db", s.simulation.hysteresis_db}};
  return j.dump(2);
}

}  // namespace cellmode::cli
