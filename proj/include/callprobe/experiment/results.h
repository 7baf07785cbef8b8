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

#ifndef CALLPROBE_EXPERIMENT_RESULTS_H_
#define CALLPROBE_EXPERIMENT_RESULTS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "callprobe/eval/metrics.h"
#include "callprobe/experiment/experiment_spec.h"
#include "callprobe/experiment/runner.h"

namespace callprobe::experiment {

// Published AUC of the supervised end-to-end reference system, shown as a
// fixed row in summary tables for the two elephant datasets.
inline constexpr double kAerdAucElev = 0.8710;
inline constexpr double kAerdAucLdc = 0.9570;

// Metrics without curves; NaN values become null.
nlohmann::json ToJson(const eval::EvalReport& report,
                      std::span<const std::string> class_names);
nlohmann::json ToJson(const RunResult& run,
                      std::span<const std::string> class_names);

// Machine-readable record of a whole experiment. Contains no timestamps or
// scheduling details, so equal inputs give equal bytes.
nlohmann::json ResultsJson(const ExperimentSpec& spec,
                           const ExperimentResult& result);

struct SummaryRow {
  std::string embedding;
  std::string layer_tag;
  int dim = 0;
  std::string classifier;  // family name
  std::string final_fit;
  double auc = 0.0;
  double map = 0.0;
  double accuracy = 0.0;
  double any_overlap_accuracy = 0.0;
  int folds_used = 0;
  int folds_total = 0;
  std::string error;
};

std::vector<SummaryRow> SummaryRowsFromResults(const nlohmann::json& results);

void WriteSummaryCsv(const std::filesystem::path& path,
                     std::span<const SummaryRow> rows);
// Table with Embedding / Dim. / Class. / AUC / mAP columns, plus the
// reference row when `dataset` is "elev" or "ldc".
std::string FormatSummaryText(std::span<const SummaryRow> rows,
                              const std::string& dataset);

// Writes results.json, summary.csv, summary.txt and, per store and family,
// reports/fold<k>.json, curves/*.csv and checkpoints/fold<k>.ckpt.
void WriteExperimentOutputs(const ExperimentSpec& spec,
                            const ExperimentResult& result);

// Rebuilds summaries and curves from a results file: metrics are recomputed
// from the stored test scores. Throws kFormatError if the recomputed macro
// values disagree with the recorded ones.
void RegenerateReport(const std::filesystem::path& results_path,
                      const std::filesystem::path& out_dir);

std::string RunDirectoryName(const std::string& layer_tag,
                             probe::ProbeFamily family);

}  // namespace callprobe::experiment

#endif  // CALLPROBE_EXPERIMENT_RESULTS_H_
