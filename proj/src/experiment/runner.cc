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

#include "callprobe/experiment/runner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "callprobe/common/error.h"
#include "callprobe/common/parallel.h"
#include "callprobe/experiment/results.h"
#include "callprobe/probe/loss.h"

namespace callprobe::experiment {
namespace {

// Stream tags for DeriveSeed.
constexpr std::uint64_t kInnerTag = 1;
constexpr std::uint64_t kRetrainTag = 2;
constexpr std::uint64_t kHoldoutTag = 3;

bool TrainingFailed(const probe::TrainTrace& t) {
  return t.non_finite || t.best_epoch == 0 ||
         !std::isfinite(t.best_dev_loss());
}

TestEvaluation Evaluate(const probe::ProbeModel& model,
                        const probe::TrainTrace& trace, FinalFit fit,
                        const ProbeData& data,
                        std::span<const probe::Example> examples,
                        std::span<const std::size_t> test, int fold) {
  TestEvaluation ev;
  ev.fit = fit;
  ev.trace = trace;
  eval::ScoreMatrix m;
  m.scores.resize(static_cast<Eigen::Index>(test.size()), data.num_classes());
  for (std::size_t r = 0; r < test.size(); ++r) {
    m.scores.row(static_cast<Eigen::Index>(r)) =
        probe::Softmax(model.Forward(examples[test[r]].input)).transpose();
    m.labels.push_back(data.labels[test[r]]);
    m.overlap_sets.push_back(data.overlaps[test[r]]);
  }
  ev.scores = m.scores;
  try {
    ev.report = eval::MacroMetrics(m, fold);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAllClassesDegenerate) throw;
    ev.report = eval::DegenerateReport(fold, data.num_classes());
  }
  return ev;
}

}  // namespace

int SelectGridPoint(std::span<const GridPointResult> table) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(table.size()); ++i) {
    const GridPointResult& g = table[i];
    if (g.aborted) continue;
    if (best < 0 || g.mean_dev_loss < table[best].mean_dev_loss ||
        (g.mean_dev_loss == table[best].mean_dev_loss &&
         TieBreakLess(g.config, table[best].config))) {
      best = i;
    }
  }
  return best;
}

std::vector<probe::Example> GatherTrainingSet(
    const ProbeData& data, std::span<const probe::Example> examples,
    std::span<const std::size_t> indices, int test_fold,
    std::atomic<std::uint64_t>& checks) {
  std::vector<probe::Example> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (data.folds[i] == test_fold) {
      throw std::logic_error("segment " + std::to_string(data.segment_ids[i]) +
                             " from test fold " + std::to_string(test_fold) +
                             " reached training");
    }
    ++checks;
    out.push_back(examples[i]);
  }
  return out;
}

RunResult RunOuterTurn(const ExperimentSpec& spec, const dataset::FoldPlan& plan,
                       const ProbeData& data,
                       std::span<const probe::Example> examples,
                       probe::ProbeFamily family, int outer_index) {
  const dataset::OuterTurn& outer = plan.outer_turns().at(outer_index);
  RunResult result;
  result.outer_index = outer_index;
  result.test_fold = outer.test_fold;
  result.layer_tag = data.layer_tag;
  result.family = family;
  std::atomic<std::uint64_t> checks{0};
  const int num_classes = data.num_classes();
  const std::uint64_t outer_tag = static_cast<std::uint64_t>(outer_index);

  try {
    const std::vector<probe::ProbeConfig> grid = ExpandGrid(spec, family);
    const std::size_t inner_count = outer.inner_turns.size();

    // Inner-turn index sets, shared by all grid points.
    std::vector<std::vector<std::size_t>> inner_train(inner_count);
    std::vector<std::vector<std::size_t>> inner_dev(inner_count);
    for (std::size_t t = 0; t < inner_count; ++t) {
      const dataset::InnerTurn& inner = outer.inner_turns[t];
      inner_train[t] = IndicesInFolds(data, inner.train_folds);
      const int dev_fold[] = {inner.dev_fold};
      inner_dev[t] = IndicesInFolds(data, dev_fold);
    }

    auto inner_config = [&](std::size_t g, std::size_t t) {
      probe::ProbeConfig c = grid[g];
      c.seed = DeriveSeed(spec.seed, {kInnerTag, outer_tag, g, t});
      return c;
    };
    auto train_inner = [&](std::size_t g, std::size_t t) {
      const auto train = GatherTrainingSet(data, examples, inner_train[t],
                                           outer.test_fold, checks);
      const auto dev = GatherTrainingSet(data, examples, inner_dev[t],
                                         outer.test_fold, checks);
      return probe::TrainProbe(train, dev, inner_config(g, t), num_classes);
    };

    const std::size_t jobs = grid.size() * inner_count;
    std::vector<probe::TrainTrace> traces(jobs);
    ParallelFor(jobs, spec.parallelism, [&](std::size_t j) {
      traces[j] = train_inner(j / inner_count, j % inner_count).trace;
    });
    result.inner_trainings = static_cast<int>(jobs);

    for (std::size_t g = 0; g < grid.size(); ++g) {
      GridPointResult point;
      point.config = grid[g];
      double sum = 0.0;
      for (std::size_t t = 0; t < inner_count; ++t) {
        const probe::TrainTrace& tr = traces[g * inner_count + t];
        const bool failed = TrainingFailed(tr);
        point.aborted = point.aborted || failed;
        point.dev_loss.push_back(failed ? std::numeric_limits<double>::quiet_NaN()
                                        : tr.best_dev_loss());
        point.stop_reason.push_back(tr.reason);
        sum += point.dev_loss.back();
      }
      point.mean_dev_loss = point.aborted
                                ? std::numeric_limits<double>::quiet_NaN()
                                : sum / static_cast<double>(inner_count);
      result.table.push_back(std::move(point));
    }
    result.selected = SelectGridPoint(result.table);
    if (result.selected < 0) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "every grid point diverged in outer turn " +
                      std::to_string(outer_index));
    }
    const std::size_t sel = static_cast<std::size_t>(result.selected);

    const int test_fold[] = {outer.test_fold};
    const std::vector<std::size_t> test = IndicesInFolds(data, test_fold);
    for (std::size_t i : test) {
      result.test_segment_ids.push_back(data.segment_ids[i]);
      result.test_labels.push_back(data.labels[i]);
    }

    // Final fits: retrain on the non-test folds with a seeded holdout, and
    // rebuild the best inner-turn model (same seed, so the same weights).
    std::vector<std::optional<probe::TrainResult>> finals(2);
    ParallelFor(2, spec.parallelism, [&](std::size_t which) {
      if (which == 0) {
        std::vector<std::size_t> pool = IndicesInFolds(data, outer.non_test_folds);
        if (pool.size() < 2) {
          throw Error(ErrorCode::kInvalidArgument,
                      "too few non-test segments for a holdout split");
        }
        std::mt19937_64 rng(DeriveSeed(spec.seed, {kHoldoutTag, outer_tag}));
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t hold = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::lround(spec.holdout_fraction * pool.size())),
            1, pool.size() - 1);
        const std::vector<std::size_t> dev_idx(pool.begin(), pool.begin() + hold);
        const std::vector<std::size_t> train_idx(pool.begin() + hold, pool.end());
        probe::ProbeConfig c = grid[sel];
        c.seed = DeriveSeed(spec.seed, {kRetrainTag, outer_tag});
        finals[0] = probe::TrainProbe(
            GatherTrainingSet(data, examples, train_idx, outer.test_fold, checks),
            GatherTrainingSet(data, examples, dev_idx, outer.test_fold, checks), c,
            num_classes);
      } else {
        const GridPointResult& point = result.table[sel];
        const std::size_t best_turn = static_cast<std::size_t>(
            std::min_element(point.dev_loss.begin(), point.dev_loss.end()) -
            point.dev_loss.begin());
        finals[1] = train_inner(sel, best_turn);
      }
    });

    TestEvaluation retrain = Evaluate(finals[0]->model, finals[0]->trace,
                                      FinalFit::kRetrain, data, examples, test,
                                      outer.test_fold);
    TestEvaluation best_inner = Evaluate(finals[1]->model, finals[1]->trace,
                                         FinalFit::kBestInner, data, examples,
                                         test, outer.test_fold);
    const bool retrain_first = spec.final_fit == FinalFit::kRetrain;
    result.primary = retrain_first ? std::move(retrain) : std::move(best_inner);
    result.alternate = retrain_first ? std::move(best_inner) : std::move(retrain);
    result.primary_model = std::move(finals[retrain_first ? 0 : 1]->model);
    result.ok = true;
  } catch (const Error& e) {
    result.ok = false;
    result.error = e.what();
  }
  result.leakage_checks = checks.load();
  return result;
}

namespace {

eval::FoldSummary Summarize(const std::vector<RunResult>& turns,
                            bool alternate) {
  std::vector<eval::EvalReport> reports;
  for (const RunResult& r : turns) {
    if (!r.ok) {
      reports.push_back(eval::DegenerateReport(r.test_fold, 0));
      continue;
    }
    reports.push_back(alternate ? r.alternate.report : r.primary.report);
  }
  return eval::FoldAverage(reports);
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentSpec& spec) {
  CheckSpecFiles(spec);
  const dataset::FoldPlan plan = dataset::FoldPlan::Load(spec.fold_plan);
  ExperimentResult result;
  for (const StoreRef& ref : spec.stores) {
    const ProbeData data = LoadProbeData(ref, plan, spec.grid_mode);
    for (probe::ProbeFamily family : spec.families) {
      RunSet set;
      set.layer_tag = ref.layer_tag;
      set.dim = data.dim;
      set.family = family;
      set.classes = data.classes;
      std::vector<probe::Example> examples;
      try {
        examples = BuildExamples(data, family);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNonTemporalInput) throw;
        set.error = e.what();
        result.partial_failure = true;
        result.runs.push_back(std::move(set));
        continue;
      }
      for (int t = 0; t < static_cast<int>(plan.outer_turns().size()); ++t) {
        set.turns.push_back(RunOuterTurn(spec, plan, data, examples, family, t));
        if (!set.turns.back().ok) result.partial_failure = true;
      }
      set.summary = Summarize(set.turns, false);
      set.alternate_summary = Summarize(set.turns, true);
      result.runs.push_back(std::move(set));
    }
  }
  return result;
}

ExperimentResult RunAndWriteExperiment(const ExperimentSpec& spec) {
  ExperimentResult result = RunExperiment(spec);
  WriteExperimentOutputs(spec, result);
  return result;
}

}  // namespace callprobe::experiment
