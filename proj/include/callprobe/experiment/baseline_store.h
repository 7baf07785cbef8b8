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

#ifndef CALLPROBE_EXPERIMENT_BASELINE_STORE_H_
#define CALLPROBE_EXPERIMENT_BASELINE_STORE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace callprobe::experiment {

enum class BaselineKind { kMfcc, kBeans };

struct BaselineOptions {
  std::filesystem::path annotations;  // TSV: recording, start, end, class
  std::filesystem::path audio_dir;    // <recording_id>.wav files
  std::filesystem::path out;          // store path (.embs)
  BaselineKind kind = BaselineKind::kMfcc;
  int beans_ceps = 40;
  double collar = 0.25;
  // Overrides the transform size; 0 sizes it to the frame.
  std::optional<int> n_fft;
  // Optional plan whose fold ids are copied into the manifest.
  std::optional<std::filesystem::path> fold_plan;
};

struct BaselineSummary {
  int written = 0;
  std::vector<std::string> skipped;  // one message per dropped segment
};

// Segments every annotation (with collar), computes MFCC sequences or BEANS
// vectors on the mono mixdown and writes a store plus manifest. MFCC stores
// are temporal; BEANS stores hold one non-temporal row per segment.
// Segments too short for one frame are skipped and listed.
BaselineSummary BuildBaselineStore(const BaselineOptions& options);

// Fold plan for the segments the annotations define (recording lengths read
// from the WAV headers when `audio_dir` is non-empty).
void BuildFoldPlanFile(const std::filesystem::path& annotations,
                       const std::filesystem::path& audio_dir, double collar,
                       int k, std::uint64_t seed,
                       const std::filesystem::path& out);

}  // namespace callprobe::experiment

#endif  // CALLPROBE_EXPERIMENT_BASELINE_STORE_H_
