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

#ifndef CALLPROBE_EXPERIMENT_PROBE_DATA_H_
#define CALLPROBE_EXPERIMENT_PROBE_DATA_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "callprobe/dataset/fold_plan.h"
#include "callprobe/experiment/experiment_spec.h"
#include "callprobe/probe/trainer.h"
#include "callprobe/store/aggregate.h"
#include "callprobe/store/embedding_store.h"

namespace callprobe::experiment {

// One store joined with the fold plan, in store record order.
struct ProbeData {
  std::string layer_tag;
  std::vector<std::string> classes;
  int dim = 0;
  bool temporal = true;
  std::vector<std::uint64_t> segment_ids;
  std::vector<int> labels;
  std::vector<int> folds;
  std::vector<std::vector<int>> overlaps;
  std::vector<store::FrameMatrix> frames;

  std::size_t size() const { return segment_ids.size(); }
  int num_classes() const { return static_cast<int>(classes.size()); }
};

// Reads the store, applies grid aggregation when the manifest marks grid
// records, and looks every segment up in the plan. Throws kInvalidSpec when a
// segment is missing from the plan or a label is out of range.
ProbeData LoadProbeData(const StoreRef& ref, const dataset::FoldPlan& plan,
                        store::GridMode grid_mode);

// Model inputs for every segment, index aligned with `data`. Throws
// kNonTemporalInput for recurrent families on non-temporal data.
std::vector<probe::Example> BuildExamples(const ProbeData& data,
                                          probe::ProbeFamily family);

// Indices of segments whose fold is in `folds`, ascending.
std::vector<std::size_t> IndicesInFolds(const ProbeData& data,
                                        std::span<const int> folds);

// Throws kInvalidSpec unless both stores list the same segments and labels
// in the same order.
void CheckSameSegments(const ProbeData& a, const ProbeData& b);

}  // namespace callprobe::experiment

#endif  // CALLPROBE_EXPERIMENT_PROBE_DATA_H_
