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

#ifndef CALLPROBE_EXPERIMENT_LAYERWISE_H_
#define CALLPROBE_EXPERIMENT_LAYERWISE_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "callprobe/experiment/experiment_spec.h"

namespace callprobe::experiment {

struct LayerwiseRow {
  int layer_index = 0;
  std::string layer_tag;
  double dev_map = 0.0;  // mean over inner turns with a valid report
  double dev_auc = 0.0;
  std::vector<double> inner_map;  // per inner turn, NaN if degenerate
};

struct LayerwiseTable {
  int outer_turn = 0;
  int test_fold = 0;
  std::vector<LayerwiseRow> rows;

  // Row index with the highest dev mAP (first on ties).
  int ArgmaxLayer() const;
};

// For one outer turn, trains a logistic-regression probe on every inner turn
// of every layer store and scores macro mAP/AUC on the inner dev fold. The
// test fold is never touched. Throws kMissingLayerStore when a listed store
// does not exist and kInvalidSpec when stores disagree on their segments.
LayerwiseTable LayerwiseSweep(const ExperimentSpec& spec);

// CSV "layer_index,layer_tag,dev_map,dev_auc".
void WriteLayerwiseCsv(const std::filesystem::path& path,
                       const LayerwiseTable& table);

}  // namespace callprobe::experiment

#endif  // CALLPROBE_EXPERIMENT_LAYERWISE_H_
