// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cellmode/classifier.hpp"
#include "cellmode/error.hpp"
#include "cellmode/eval.hpp"
#include "cellmode/features.hpp"
#include "cellmode/ingest.hpp"
#include "cellmode/preprocess.hpp"
#include "cellmode/synth.hpp"
#include "cellmode/trace.hpp"
#include "run_config.hpp"

namespace cellmode::cli {
namespace {

namespace fs = std::filesystem;

// Output either to a file or to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot create " + path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::vector<FeatureVector> read_all_instances(const std::vector<std::string>& paths) {
  std::vector<FeatureVector> all;
  for (const auto& p : paths) {
    auto part = read_instances_file(p);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

std::vector<FeatureVector> labeled_only(const std::vector<FeatureVector>& in, std::ostream& err) {
  std::vector<FeatureVector> out;
  for (const auto& fv : in) {
    if (fv.label) out.push_back(fv);
  }
  if (out.size() != in.size()) {
    err << "skipping " << in.size() - out.size() << " unlabeled instance(s)\n";
  }
  return out;
}

CLI::Option* add_tree_options(CLI::App* cmd, RunConfig& cfg, std::size_t& min_split) {
  cmd->add_option("--max-depth", cfg.tree.max_depth, "Maximum tree depth")->capture_default_str();
  cmd->add_option("--min-leaf", cfg.tree.min_leaf, "Minimum instances per leaf")
      ->capture_default_str();
  return cmd->add_option("--min-split", min_split, "Minimum instances to split a node")
      ->default_str(std::to_string(cfg.tree.effective_min_split()));
}

void add_smoothing_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--max-gap", cfg.smoothing.max_gap, "Longest excursion replaced, in samples")
      ->capture_default_str();
  cmd->add_option("--min-flank", cfg.smoothing.min_flank,
                  "Shortest qualifying flank run, in samples")
      ->capture_default_str();
}

void add_config_option(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path, "JSON run configuration; explicit flags override it");
}

std::string windows_str(const ExtractionParams& p) {
  return std::to_string(p.window_sizes_s[0]) + "," + std::to_string(p.window_sizes_s[1]) + "," +
         std::to_string(p.window_sizes_s[2]);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    if (auto path = find_config_path(args)) cfg = load_run_config(*path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }

  CLI::App app{"Transportation mode detection from serving-cell traces", "cellmode"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration; explicit flags override it");

  std::function<void()> action;
  std::size_t min_split = cfg.tree.effective_min_split();
  std::vector<std::string> inputs;
  std::string out_path;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a trace file and print a summary");
  add_config_option(ingest, config_path);
  ingest->add_option("input", inputs, "Trace CSV")->required()->expected(1);
  ingest->add_option("--out", out_path, "Rewrite the trace in canonical form");
  ingest->callback([&] {
    action = [&] {
      const Trace t = read_trace_file(inputs.front());
      std::set<std::string> cells;
      for (const auto& s : t.samples) cells.insert(s.cell_id);
      out << "samples:  " << t.samples.size() << '\n';
      out << "segments: " << t.segments.size() << '\n';
      out << "cells:    " << cells.size() << '\n';
      if (!t.samples.empty()) {
        out << "span_s:   "
            << static_cast<double>(t.samples.back().timestamp_ms - t.samples.front().timestamp_ms) /
                   1000.0
            << '\n';
      }
      for (const auto& seg : t.segments) {
        out << "segment:  " << seg.start_ms << ' ' << seg.end_ms << ' ' << to_string(seg.mode)
            << '\n';
      }
      if (!out_path.empty()) write_trace_file(t, out_path);
    };
  });

  // smooth
  auto* smooth = app.add_subcommand("smooth", "Remove ping-pong handoffs from a trace");
  add_config_option(smooth, config_path);
  smooth->add_option("input", inputs, "Trace CSV")->required()->expected(1);
  smooth->add_option("--out", out_path, "Output trace (default: stdout)");
  add_smoothing_options(smooth, cfg);
  smooth->callback([&] {
    action = [&] {
      const auto result = smooth_pingpong_counted(read_trace_file(inputs.front()), cfg.smoothing);
      Sink sink(out_path, out);
      write_trace(result.trace, sink.stream());
      err << "smoothing passes: " << result.passes << '\n';
    };
  });

  // features
  std::vector<int> windows;
  bool smooth_first = false;
  auto* features = app.add_subcommand("features", "Extract 36-feature instances from traces");
  add_config_option(features, config_path);
  features->add_option("inputs", inputs, "Trace CSV files")->required();
  features->add_option("--out", out_path, "Instances CSV (default: stdout)");
  features->add_option("--windows", windows, "Three nested window sizes in seconds")
      ->delimiter(',')
      ->expected(3)
      ->default_str(windows_str(cfg.features));
  features->add_option("--min-coverage", cfg.features.min_coverage,
                       "Fraction of 1 Hz samples a window needs")
      ->capture_default_str();
  features->add_option("--label-agreement", cfg.features.label_agreement,
                       "Fraction of labeled samples that must agree")
      ->capture_default_str();
  features->add_flag("--smooth", smooth_first, "Apply ping-pong smoothing before extraction");
  add_smoothing_options(features, cfg);
  features->callback([&] {
    action = [&] {
      if (!windows.empty()) {
        std::copy(windows.begin(), windows.end(), cfg.features.window_sizes_s.begin());
      }
      check_extraction_params(cfg.features);
      std::vector<FeatureVector> all;
      for (const auto& p : inputs) {
        Trace t = read_trace_file(p);
        if (smooth_first) t = smooth_pingpong(t, cfg.smoothing);
        auto part = extract_instances(t, cfg.features);
        all.insert(all.end(), part.begin(), part.end());
      }
      Sink sink(out_path, out);
      write_instances(all, sink.stream());
      err << all.size() << " instance(s)\n";
    };
  });

  // train
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train a decision tree on labeled instances");
  add_config_option(train_cmd, config_path);
  train_cmd->add_option("inputs", inputs, "Instances CSV files")->required();
  train_cmd->add_option("--out", out_path, "Model file (default: stdout)");
  train_cmd->add_option("--seed", train_seed, "Reserved; training is deterministic")
      ->capture_default_str();
  CLI::Option* train_min_split = add_tree_options(train_cmd, cfg, min_split);
  train_cmd->callback([&] {
    action = [&] {
      const auto data = labeled_only(read_all_instances(inputs), err);
      const DecisionTree tree = train(data, cfg.tree, train_seed);
      Sink sink(out_path, out);
      save_model(tree, sink.stream());
      err << "trained on " << data.size() << " instance(s): depth " << tree.depth() << ", "
          << tree.leaf_count() << " leaves\n";
    };
  });

  // predict
  std::string model_path;
  auto* predict_cmd = app.add_subcommand("predict", "Classify instances with a trained model");
  add_config_option(predict_cmd, config_path);
  predict_cmd->add_option("inputs", inputs, "Instances CSV files")->required();
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--out", out_path, "Predictions CSV (default: stdout)");
  predict_cmd->callback([&] {
    action = [&] {
      const DecisionTree tree = load_model_file(model_path);
      const auto data = read_all_instances(inputs);
      Sink sink(out_path, out);
      sink.stream() << "window_start_ms,label,predicted\n";
      for (const auto& fv : data) {
        sink.stream() << fv.window_start_ms << ','
                      << (fv.label ? to_string(*fv.label) : std::string_view{}) << ','
                      << to_string(tree.predict(fv.features)) << '\n';
      }
    };
  });

  // eval
  std::string format = "text";
  auto* eval_cmd = app.add_subcommand("eval", "K-fold cross-validation report");
  add_config_option(eval_cmd, config_path);
  eval_cmd->add_option("inputs", inputs, "Instances CSV files")->required();
  eval_cmd->add_option("--k", cfg.cv.k, "Number of folds")->capture_default_str();
  eval_cmd->add_option("--seed", cfg.cv.seed, "Fold shuffle seed")->capture_default_str();
  eval_cmd->add_option("--jobs", cfg.jobs, "Folds trained in parallel")->capture_default_str();
  eval_cmd->add_flag("--stratified", cfg.cv.stratified, "Deal folds per class");
  eval_cmd->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", out_path, "Report file (default: stdout)");
  CLI::Option* eval_min_split = add_tree_options(eval_cmd, cfg, min_split);
  eval_cmd->callback([&] {
    action = [&] {
      const auto data = labeled_only(read_all_instances(inputs), err);
      const auto matrix = cross_validate(data, cfg.cv.k, cfg.tree, cfg.cv.seed,
                                         {cfg.cv.stratified, cfg.jobs});
      Sink sink(out_path, out);
      render_report(metrics(matrix), *parse_report_format(format), sink.stream());
    };
  });

  // simulate
  std::string mode_name;
  std::size_t suite = 0;
  std::size_t index = 0;
  auto& sp = cfg.synth;
  auto& pl = sp.simulation.path_loss;
  auto* sim = app.add_subcommand("simulate", "Generate synthetic labeled traces");
  add_config_option(sim, config_path);
  sim->add_option("--mode", mode_name, "stationary, walking or driving")
      ->check(CLI::IsMember({"stationary", "walking", "driving"}));
  sim->add_option("--duration-s", sp.duration_s, "Trace length in seconds")->capture_default_str();
  sim->add_option("--extent-m", sp.extent_m, "Side of the square area")->capture_default_str();
  sim->add_option("--spacing-m", sp.spacing_m, "Tower grid pitch")->capture_default_str();
  sim->add_option("--jitter", sp.jitter_frac, "Tower position jitter, fraction of pitch")
      ->capture_default_str();
  sim->add_option("--p0-dbm", pl.p0_dbm, "Power at the reference distance")->capture_default_str();
  sim->add_option("--d0-m", pl.d0_m, "Reference distance")->capture_default_str();
  sim->add_option("--alpha", pl.alpha, "Path loss exponent")->capture_default_str();
  sim->add_option("--shadow-sigma", pl.shadow_sigma_db, "Shadowing std in dB")
      ->capture_default_str();
  sim->add_option("--decorrelation-m", pl.decorrelation_m, "Shadowing decorrelation distance")
      ->capture_default_str();
  sim->add_option("--hysteresis-db", sp.simulation.hysteresis_db, "Handoff margin")
      ->capture_default_str();
  sim->add_option("--seed", sp.seed, "Suite seed")->capture_default_str();
  sim->add_option("--index", index, "Trace index within the mode")->capture_default_str();
  sim->add_option("--suite", suite, "Emit N traces per mode into the --out directory");
  sim->add_option("--out", out_path, "Trace file, or directory with --suite (default: stdout)");
  sim->callback([&] {
    if (suite == 0 && mode_name.empty()) throw CLI::RequiredError("--mode");
    if (suite > 0 && out_path.empty()) throw CLI::RequiredError("--out");
    action = [&] {
      check_run_config(cfg);
      if (suite > 0) {
        sp.traces_per_mode = suite;
        fs::create_directories(out_path);
        const auto traces = generate_suite(sp);
        for (const auto& lt : traces) {
          char name[64];
          std::snprintf(name, sizeof name, "%s_%03zu.csv", std::string(to_string(lt.mode)).c_str(),
                        lt.index);
          write_trace_file(lt.trace, fs::path(out_path) / name);
        }
        err << "wrote " << traces.size() << " trace(s) to " << out_path << '\n';
        return;
      }
      const auto lt = generate_suite_trace(sp, *parse_mode(mode_name), index);
      Sink sink(out_path, out);
      write_trace(lt.trace, sink.stream());
    };
  });

  // report
  auto* report = app.add_subcommand(
      "report", "Render a saved JSON report, or score a model on labeled instances");
  add_config_option(report, config_path);
  report->add_option("inputs", inputs, "JSON report, or instances CSV with --model")->required();
  report->add_option("--model", model_path, "Model file");
  report->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  report->add_option("--out", out_path, "Report file (default: stdout)");
  report->callback([&] {
    action = [&] {
      ConfusionMatrix matrix;
      if (model_path.empty()) {
        std::ifstream in(inputs.front());
        if (!in) throw Error("cannot open " + inputs.front());
        matrix = parse_report_counts(in);
      } else {
        const DecisionTree tree = load_model_file(model_path);
        matrix = evaluate(tree, labeled_only(read_all_instances(inputs), err));
      }
      Sink sink(out_path, out);
      render_report(metrics(matrix), *parse_report_format(format), sink.stream());
    };
  });

  std::vector<const char*> argv{"cellmode"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (train_min_split->count() > 0 || eval_min_split->count() > 0) {
      cfg.tree.min_split = min_split;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (action) action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace cellmode::cli
