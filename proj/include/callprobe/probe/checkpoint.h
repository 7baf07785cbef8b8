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

#ifndef CALLPROBE_PROBE_CHECKPOINT_H_
#define CALLPROBE_PROBE_CHECKPOINT_H_

#include <filesystem>

#include <json.hpp>

#include "callprobe/probe/model.h"
#include "callprobe/probe/trainer.h"

namespace callprobe::probe {

// Binary layout: magic "PRBC", u32 version, u32 dtype (1 = float64 LE),
// u32 tensor count, then per tensor u32 rows, u32 cols and rows*cols values
// in column-major order. The JSON header next to it (<path>.json) holds the
// probe config, shapes, tensor names and the training trace.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::filesystem::path CheckpointHeaderPath(const std::filesystem::path& path);

nlohmann::json ToJson(const TrainTrace& trace);
TrainTrace TrainTraceFromJson(const nlohmann::json& j);

void SaveCheckpoint(const std::filesystem::path& path, const ProbeModel& model,
                    const TrainTrace& trace);

struct Checkpoint {
  ProbeModel model;
  TrainTrace trace;
};

// Throws kFormatError on bad magic/version/dtype, shape disagreement with
// the header, truncation or trailing bytes.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_CHECKPOINT_H_
