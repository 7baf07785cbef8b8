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

#include "callprobe/experiment/probe_data.h"

#include <algorithm>

#include "callprobe/common/error.h"

namespace callprobe::experiment {

ProbeData LoadProbeData(const StoreRef& ref, const dataset::FoldPlan& plan,
                        store::GridMode grid_mode) {
  store::Store s = store::ReadStore(ref.path);
  const store::StoreManifest& m = s.manifest;
  ProbeData data;
  data.layer_tag = ref.layer_tag;
  data.classes = m.classes;
  data.dim = static_cast<int>(m.dim);
  data.temporal = m.temporal;
  if (m.grid_spec_patches > 0 && grid_mode == store::GridMode::kSpec) {
    data.temporal = false;
  }
  for (std::size_t i = 0; i < s.sequences.size(); ++i) {
    const store::SegmentEntry& e = m.segments[i];
    if (e.label < 0 || e.label >= static_cast<int>(m.classes.size())) {
      throw Error(ErrorCode::kInvalidSpec,
                  ref.path.string() + ": segment " + std::to_string(e.segment_id) +
                      " has label " + std::to_string(e.label) + " outside classes");
    }
    int fold;
    try {
      fold = plan.FoldOf(e.segment_id);
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidSpec,
                  ref.path.string() + ": segment " + std::to_string(e.segment_id) +
                      " is not in the fold plan");
    }
    data.segment_ids.push_back(e.segment_id);
    data.labels.push_back(e.label);
    data.folds.push_back(fold);
    data.overlaps.push_back(e.overlapping_labels);
    if (m.grid_spec_patches > 0) {
      const store::EmbeddingGrid grid = store::GridFromFlattened(
          s.sequences[i], static_cast<int>(m.grid_spec_patches));
      data.frames.push_back(store::GridAggregate(grid, grid_mode).values);
    } else {
      data.frames.push_back(std::move(s.sequences[i].values));
    }
  }
  return data;
}

std::vector<probe::Example> BuildExamples(const ProbeData& data,
                                          probe::ProbeFamily family) {
  std::vector<probe::Example> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.push_back({probe::PrepareInput(family, data.frames[i], data.temporal),
                   data.labels[i]});
  }
  return out;
}

std::vector<std::size_t> IndicesInFolds(const ProbeData& data,
                                        std::span<const int> folds) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (std::find(folds.begin(), folds.end(), data.folds[i]) != folds.end()) {
      out.push_back(i);
    }
  }
  return out;
}

void CheckSameSegments(const ProbeData& a, const ProbeData& b) {
  if (a.segment_ids != b.segment_ids || a.labels != b.labels) {
    throw Error(ErrorCode::kInvalidSpec, "stores '" + a.layer_tag + "' and '" +
                                             b.layer_tag +
                                             "' cover different segments");
  }
}

}  // namespace callprobe::experiment
