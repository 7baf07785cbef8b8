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

#ifndef CALLPROBE_EXPERIMENT_RUNNER_H_
#define CALLPROBE_EXPERIMENT_RUNNER_H_

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "callprobe/dataset/fold_plan.h"
#include "callprobe/eval/metrics.h"
#include "callprobe/experiment/experiment_spec.h"
#include "callprobe/experiment/probe_data.h"
#include "callprobe/probe/trainer.h"

namespace callprobe::experiment {

// Dev losses of one grid point across the inner turns of an outer turn.
struct GridPointResult {
  probe::ProbeConfig config;
  std::vector<double> dev_loss;  // best dev loss per inner turn
  std::vector<probe::StopReason> stop_reason;
  double mean_dev_loss = 0.0;
  // A training hit a non-finite gradient or loss; the point is skipped.
  bool aborted = false;
};

// Test-fold evaluation of one final model.
struct TestEvaluation {
  FinalFit fit = FinalFit::kRetrain;
  probe::TrainTrace trace;
  eval::EvalReport report;
  Eigen::MatrixXd scores;  // softmax outputs, test segments x classes
};

struct RunResult {
  int outer_index = 0;
  int test_fold = 0;
  std::string layer_tag;
  probe::ProbeFamily family = probe::ProbeFamily::kLogistic;

  bool ok = false;
  std::string error;

  std::vector<GridPointResult> table;  // tie-break order
  int selected = -1;
  int inner_trainings = 0;

  // One evaluation per final-fit mode; `primary` follows ExperimentSpec::final_fit.
  TestEvaluation primary;
  TestEvaluation alternate;
  std::optional<probe::ProbeModel> primary_model;

  std::vector<std::uint64_t> test_segment_ids;
  std::vector<int> test_labels;
  // Training examples checked against the test fold.
  std::uint64_t leakage_checks = 0;
};

// Argmin of the mean dev loss over non-aborted points; ties go to the point
// first in tie-break order. Returns -1 if every point aborted.
int SelectGridPoint(std::span<const GridPointResult> table);

// Copies the examples at `indices`, asserting that none of them belongs to
// `test_fold`. A violation throws std::logic_error; every checked example
// increments `checks`.
std::vector<probe::Example> GatherTrainingSet(
    const ProbeData& data, std::span<const probe::Example> examples,
    std::span<const std::size_t> indices, int test_fold,
    std::atomic<std::uint64_t>& checks);

// Inner-turn grid search, selection, final fit and a single evaluation on
// the test fold of outer turn `outer_index`. Never throws for training
// failures; they are reported through `ok` and `error`.
RunResult RunOuterTurn(const ExperimentSpec& spec, const dataset::FoldPlan& plan,
                       const ProbeData& data,
                       std::span<const probe::Example> examples,
                       probe::ProbeFamily family, int outer_index);

// All outer turns for one (store, family) pair.
struct RunSet {
  std::string layer_tag;
  int dim = 0;
  probe::ProbeFamily family = probe::ProbeFamily::kLogistic;
  std::vector<std::string> classes;
  std::vector<RunResult> turns;
  eval::FoldSummary summary;            // primary final-fit mode
  eval::FoldSummary alternate_summary;  // the other mode
  std::string error;  // set when the family cannot run on this store
};

struct ExperimentResult {
  std::vector<RunSet> runs;
  bool partial_failure = false;
};

// Runs every store x family combination. Throws kInvalidSpec for missing
// files and inconsistent inputs; per-turn failures only set partial_failure.
ExperimentResult RunExperiment(const ExperimentSpec& spec);

// RunExperiment followed by writing results.json, summaries, per-fold
// reports, curves and checkpoints under spec.output_dir.
ExperimentResult RunAndWriteExperiment(const ExperimentSpec& spec);

}  // namespace callprobe::experiment

#endif  // CALLPROBE_EXPERIMENT_RUNNER_H_
