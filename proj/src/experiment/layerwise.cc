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

#include "callprobe/experiment/layerwise.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "callprobe/common/error.h"
#include "callprobe/common/parallel.h"
#include "callprobe/eval/metrics.h"
#include "callprobe/experiment/probe_data.h"
#include "callprobe/experiment/runner.h"
#include "callprobe/probe/loss.h"

namespace callprobe::experiment {
namespace {

constexpr std::uint64_t kLayerwiseTag = 4;

struct DevScore {
  double map = std::numeric_limits<double>::quiet_NaN();
  double auc = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

int LayerwiseTable::ArgmaxLayer() const {
  int best = -1;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (!std::isfinite(rows[i].dev_map)) continue;
    if (best < 0 || rows[i].dev_map > rows[best].dev_map) best = i;
  }
  return best;
}

LayerwiseTable LayerwiseSweep(const ExperimentSpec& spec) {
  for (const StoreRef& s : spec.stores) {
    if (!std::filesystem::exists(s.path)) {
      throw Error(ErrorCode::kMissingLayerStore,
                  "no store for layer '" + s.layer_tag + "' at " + s.path.string());
    }
  }
  if (!std::filesystem::exists(spec.fold_plan)) {
    throw Error(ErrorCode::kInvalidSpec,
                "fold plan not found: " + spec.fold_plan.string());
  }
  const dataset::FoldPlan plan = dataset::FoldPlan::Load(spec.fold_plan);
  if (spec.layerwise_outer_turn >= static_cast<int>(plan.outer_turns().size())) {
    throw Error(ErrorCode::kInvalidSpec, "layerwise outer turn out of range");
  }
  const dataset::OuterTurn& outer = plan.outer_turns()[spec.layerwise_outer_turn];

  std::vector<ProbeData> layers;
  std::vector<std::vector<probe::Example>> examples;
  for (const StoreRef& s : spec.stores) {
    layers.push_back(LoadProbeData(s, plan, spec.grid_mode));
    if (layers.size() > 1) CheckSameSegments(layers.front(), layers.back());
    examples.push_back(BuildExamples(layers.back(), probe::ProbeFamily::kLogistic));
  }

  probe::ProbeConfig base;
  base.family = probe::ProbeFamily::kLogistic;
  base.hidden = 0;
  base.learning_rate = spec.layerwise_learning_rate;
  base.batch_size = spec.batch_size;
  base.max_epochs = spec.max_epochs;
  base.patience = spec.patience;
  base.convergence_tolerance = spec.convergence_tolerance;

  const std::size_t inner_count = outer.inner_turns.size();
  std::vector<DevScore> scores(layers.size() * inner_count);
  std::atomic<std::uint64_t> checks{0};
  ParallelFor(scores.size(), spec.parallelism, [&](std::size_t job) {
    const std::size_t layer = job / inner_count;
    const std::size_t t = job % inner_count;
    const ProbeData& data = layers[layer];
    const dataset::InnerTurn& inner = outer.inner_turns[t];
    const int dev_fold[] = {inner.dev_fold};
    const std::vector<std::size_t> train_idx = IndicesInFolds(data, inner.train_folds);
    const std::vector<std::size_t> dev_idx = IndicesInFolds(data, dev_fold);
    const auto train = GatherTrainingSet(data, examples[layer], train_idx,
                                         outer.test_fold, checks);
    const auto dev = GatherTrainingSet(data, examples[layer], dev_idx,
                                       outer.test_fold, checks);
    probe::ProbeConfig c = base;
    // Same stream for every layer, so identical stores give identical rows.
    c.seed = DeriveSeed(spec.seed,
                        {kLayerwiseTag,
                         static_cast<std::uint64_t>(spec.layerwise_outer_turn), t});
    const probe::TrainResult r = probe::TrainProbe(train, dev, c, data.num_classes());
    eval::ScoreMatrix m;
    m.scores.resize(static_cast<Eigen::Index>(dev.size()), data.num_classes());
    for (std::size_t i = 0; i < dev.size(); ++i) {
      m.scores.row(static_cast<Eigen::Index>(i)) =
          probe::Softmax(r.model.Forward(dev[i].input)).transpose();
      m.labels.push_back(dev[i].label);
    }
    try {
      const eval::EvalReport rep = eval::MacroMetrics(m, inner.dev_fold);
      scores[job] = {rep.macro_ap, rep.macro_auc};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAllClassesDegenerate &&
          e.code() != ErrorCode::kNonFiniteValue) {
        throw;
      }
    }
  });

  LayerwiseTable table;
  table.outer_turn = spec.layerwise_outer_turn;
  table.test_fold = outer.test_fold;
  for (std::size_t layer = 0; layer < layers.size(); ++layer) {
    LayerwiseRow row;
    row.layer_index = static_cast<int>(layer);
    row.layer_tag = layers[layer].layer_tag;
    double map = 0.0, auc = 0.0;
    int used = 0;
    for (std::size_t t = 0; t < inner_count; ++t) {
      const DevScore& s = scores[layer * inner_count + t];
      row.inner_map.push_back(s.map);
      if (!std::isfinite(s.map)) continue;
      map += s.map;
      auc += s.auc;
      ++used;
    }
    row.dev_map = used > 0 ? map / used : std::numeric_limits<double>::quiet_NaN();
    row.dev_auc = used > 0 ? auc / used : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(std::move(row));
  }
  return table;
}

void WriteLayerwiseCsv(const std::filesystem::path& path,
                       const LayerwiseTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out << "layer_index,layer_tag,dev_map,dev_auc\n";
  char buf[64];
  for (const LayerwiseRow& r : table.rows) {
    out << r.layer_index << ',' << r.layer_tag << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.dev_map, r.dev_auc);
    out << buf << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace callprobe::experiment
