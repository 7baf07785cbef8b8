/*
 * Copyright 2026 The callprobe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: baseline features, fold plans, nested
// cross-validation experiments, layerwise sweeps, synthetic fixtures and
// report regeneration.
//
// Exit codes: 0 success, 1 failure or partial failure, 2 invalid spec or
// arguments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "callprobe/common/error.h"
#include "callprobe/experiment/baseline_store.h"
#include "callprobe/experiment/experiment_spec.h"
#include "callprobe/experiment/layerwise.h"
#include "callprobe/experiment/results.h"
#include "callprobe/experiment/runner.h"
#include "callprobe/experiment/synthetic.h"

namespace {

namespace fs = std::filesystem;
using namespace callprobe;
using namespace callprobe::experiment;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvalid = 2;

int RunFeatures(const BaselineOptions& options) {
  const BaselineSummary s = BuildBaselineStore(options);
  for (const std::string& msg : s.skipped) std::cerr << "skipped " << msg << '\n';
  std::cout << "wrote " << s.written << " segments to " << options.out.string()
            << '\n';
  return s.skipped.empty() ? kOk : kFailure;
}

ExperimentSpec LoadSpecWithOverrides(const fs::path& path, int parallelism,
                                     const std::string& output_dir) {
  ExperimentSpec spec = LoadExperimentSpec(path);
  if (parallelism > 0) spec.parallelism = parallelism;
  if (!output_dir.empty()) spec.output_dir = output_dir;
  return spec;
}

int RunTrain(const fs::path& spec_path, int parallelism,
             const std::string& output_dir) {
  const ExperimentSpec spec =
      LoadSpecWithOverrides(spec_path, parallelism, output_dir);
  const ExperimentResult result = RunAndWriteExperiment(spec);
  std::ifstream summary(spec.output_dir / "summary.txt");
  std::cout << summary.rdbuf();
  for (const RunSet& set : result.runs) {
    if (!set.error.empty()) std::cerr << set.layer_tag << ": " << set.error << '\n';
    for (const RunResult& r : set.turns) {
      if (!r.ok) {
        std::cerr << set.layer_tag << "/" << probe::FamilyName(set.family)
                  << " outer turn " << r.outer_index << ": " << r.error << '\n';
      }
    }
  }
  std::cout << "results in " << spec.output_dir.string() << '\n';
  return result.partial_failure ? kFailure : kOk;
}

int RunLayerwise(const fs::path& spec_path, int parallelism,
                 const std::string& output_dir, const std::string& csv) {
  const ExperimentSpec spec =
      LoadSpecWithOverrides(spec_path, parallelism, output_dir);
  const LayerwiseTable table = LayerwiseSweep(spec);
  const fs::path out = csv.empty() ? spec.output_dir / "layerwise.csv" : fs::path(csv);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  WriteLayerwiseCsv(out, table);
  std::printf("outer turn %d (test fold %d)\n", table.outer_turn, table.test_fold);
  std::printf("%5s  %-10s  %8s  %8s\n", "layer", "tag", "dev mAP", "dev AUC");
  for (const LayerwiseRow& r : table.rows) {
    std::printf("%5d  %-10s  %8.4f  %8.4f\n", r.layer_index, r.layer_tag.c_str(),
                r.dev_map, r.dev_auc);
  }
  const int best = table.ArgmaxLayer();
  if (best >= 0) std::printf("peak at layer %d (%s)\n", best, table.rows[best].layer_tag.c_str());
  return kOk;
}

struct SynthArgs {
  SyntheticOptions options;
  fs::path out_dir;
  int layers = 0;
  int separable_layer = 2;
  std::string family = "lr";
};

int RunSynth(const SynthArgs& a) {
  nlohmann::json spec = {{"fold_plan", "folds.json"},
                         {"families", {a.family}},
                         {"output_dir", "results"},
                         {"seed", a.options.seed}};
  if (a.layers > 0) {
    const auto tags = WriteLayerStack(a.out_dir, a.options, a.layers, a.separable_layer);
    spec["layer_tags"] = tags;
    spec["store_template"] = "{tag}.embs";
    std::cout << "wrote " << tags.size() << " layer stores to " << a.out_dir.string()
              << '\n';
  } else {
    WriteSynthetic(a.out_dir, "synth", GenerateSynthetic(a.options));
    spec["store"] = "synth.embs";
    spec["embedding"] = "synthetic";
    std::cout << "wrote " << a.out_dir.string() << "/synth.embs\n";
  }
  std::ofstream(a.out_dir / "spec.json") << spec.dump(2) << '\n';
  std::cout << "spec: " << (a.out_dir / "spec.json").string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probe frozen audio embeddings under nested cross-validation."};
  app.require_subcommand(1);

  BaselineOptions features;
  std::string kind = "mfcc";
  int n_fft = -1;
  std::string features_plan;
  auto* cmd_features = app.add_subcommand(
      "features", "WAV files + annotations -> MFCC or BEANS baseline store");
  cmd_features->add_option("--annotations", features.annotations, "annotation TSV")->required();
  cmd_features->add_option("--audio-dir", features.audio_dir, "directory of <recording>.wav")
      ->required();
  cmd_features->add_option("--out", features.out, "output store (.embs)")->required();
  cmd_features->add_option("--kind", kind, "mfcc or beans")
      ->check(CLI::IsMember({"mfcc", "beans"}));
  cmd_features->add_option("--beans-ceps", features.beans_ceps, "cepstra per frame for BEANS");
  cmd_features->add_option("--collar", features.collar, "seconds added on both sides");
  cmd_features->add_option("--n-fft", n_fft,
                           "transform size (0 = next power of two of the frame)");
  cmd_features->add_option("--fold-plan", features_plan, "copy fold ids from this plan");

  std::string folds_annotations, folds_audio, folds_out;
  double folds_collar = 0.25;
  int folds_k = 5;
  std::uint64_t folds_seed = 0;
  auto* cmd_folds = app.add_subcommand("folds", "annotations -> fold plan");
  cmd_folds->add_option("--annotations", folds_annotations, "annotation TSV")->required();
  cmd_folds->add_option("--audio-dir", folds_audio, "WAV directory (for clamping)");
  cmd_folds->add_option("--collar", folds_collar, "seconds added on both sides");
  cmd_folds->add_option("-k,--folds", folds_k, "number of folds");
  cmd_folds->add_option("--seed", folds_seed, "shuffle seed");
  cmd_folds->add_option("--out", folds_out, "output plan (JSON)")->required();

  std::string spec_path, output_dir, layer_csv;
  int parallelism = 0;
  auto* cmd_train = app.add_subcommand("train", "run the full nested-CV experiment");
  cmd_train->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
  cmd_train->add_option("-j,--parallelism", parallelism, "worker threads");
  cmd_train->add_option("--output-dir", output_dir, "override output_dir from the spec file");

  auto* cmd_layerwise = app.add_subcommand("layerwise", "per-layer linear probing table");
  cmd_layerwise->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
  cmd_layerwise->add_option("-j,--parallelism", parallelism, "worker threads");
  cmd_layerwise->add_option("--output-dir", output_dir, "override output_dir from the spec file");
  cmd_layerwise->add_option("--csv", layer_csv, "table path (default <output_dir>/layerwise.csv)");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic store and fold plan");
  cmd_synth->add_option("--out-dir", synth.out_dir, "output directory")->required();
  cmd_synth->add_option("--classes", synth.options.num_classes, "class count");
  cmd_synth->add_option("--per-class", synth.options.per_class, "segments per class");
  cmd_synth->add_option("--dim", synth.options.dim, "embedding dimension");
  cmd_synth->add_option("--min-frames", synth.options.min_frames, "shortest sequence");
  cmd_synth->add_option("--max-frames", synth.options.max_frames, "longest sequence");
  cmd_synth->add_option("--separation", synth.options.separation,
                        "distance between class means (noise std 1)");
  cmd_synth->add_option("--seed", synth.options.seed, "generator seed");
  cmd_synth->add_option("-k,--folds", synth.options.folds, "number of folds");
  cmd_synth->add_option("--layers", synth.layers,
                        "write feat + this many layer stores instead of one store");
  cmd_synth->add_option("--separable-layer", synth.separable_layer,
                        "layer index given the separation (0 = feat)");
  cmd_synth->add_option("--family", synth.family, "probe family in the written spec");

  std::string results_path, report_dir;
  auto* cmd_report = app.add_subcommand("report", "results file -> tables and curves");
  cmd_report->add_option("--results", results_path, "results.json")->required();
  cmd_report->add_option("--out-dir", report_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*cmd_features) {
      features.kind = kind == "beans" ? BaselineKind::kBeans : BaselineKind::kMfcc;
      if (n_fft >= 0) features.n_fft = n_fft;
      if (!features_plan.empty()) features.fold_plan = fs::path(features_plan);
      return RunFeatures(features);
    }
    if (*cmd_folds) {
      BuildFoldPlanFile(folds_annotations, folds_audio, folds_collar, folds_k,
                        folds_seed, folds_out);
      std::cout << "wrote " << folds_out << '\n';
      return kOk;
    }
    if (*cmd_train) return RunTrain(spec_path, parallelism, output_dir);
    if (*cmd_layerwise) {
      return RunLayerwise(spec_path, parallelism, output_dir, layer_csv);
    }
    if (*cmd_synth) return RunSynth(synth);
    if (*cmd_report) {
      RegenerateReport(results_path, report_dir);
      std::ifstream summary(fs::path(report_dir) / "summary.txt");
      std::cout << summary.rdbuf();
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::kInvalidSpec ||
        e.code() == ErrorCode::kNonTemporalInput ||
        e.code() == ErrorCode::kConfigError) {
      return kInvalid;
    }
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
