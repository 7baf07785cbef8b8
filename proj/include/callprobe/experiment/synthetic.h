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

#ifndef CALLPROBE_EXPERIMENT_SYNTHETIC_H_
#define CALLPROBE_EXPERIMENT_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "callprobe/dataset/fold_plan.h"
#include "callprobe/store/embedding_store.h"

namespace callprobe::experiment {

// Frames of a class-c segment are mu_c + N(0, I). The class means sit on
// orthonormal directions (random when C > D) scaled so that every pair of
// means is `separation` apart; separation 0 gives chance-level data.
struct SyntheticOptions {
  int num_classes = 4;
  int per_class = 125;
  int dim = 16;
  int min_frames = 4;
  int max_frames = 12;
  double separation = 5.0;
  std::uint64_t seed = 0;
  int folds = 5;
  int segments_per_recording = 4;
  std::string layer_tag = "final";
};

struct SyntheticData {
  store::StoreManifest manifest;
  std::vector<store::EmbeddingSequence> sequences;
  dataset::FoldPlan plan;
};

// Segment ids, labels, lengths, recordings and folds depend only on
// options.seed (and the class/count/frame/fold settings); `value_stream`
// selects an independent draw of the frame noise.
SyntheticData GenerateSynthetic(const SyntheticOptions& options,
                                std::uint64_t value_stream = 0);

// Writes <dir>/<stem>.embs, its manifest <dir>/<stem>.json and
// <dir>/folds.json.
void WriteSynthetic(const std::filesystem::path& dir, const std::string& stem,
                    const SyntheticData& data);

// Writes stores "feat", "layer01" .. "layerNN" over one shared segment table
// plus folds.json. Only layer index `separable_layer` (0 = feat) gets the
// requested separation; the others get 0. Returns the layer tags in order.
std::vector<std::string> WriteLayerStack(const std::filesystem::path& dir,
                                         const SyntheticOptions& options,
                                         int num_layers, int separable_layer);

}  // namespace callprobe::experiment

#endif  // CALLPROBE_EXPERIMENT_SYNTHETIC_H_
