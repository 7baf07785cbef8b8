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

#include "callprobe/store/aggregate.h"

#include <string>

namespace callprobe::store {

std::string_view GridModeName(GridMode mode) {
  switch (mode) {
    case GridMode::kTimeSpec:
      return "time+spec";
    case GridMode::kTime:
      return "time";
    case GridMode::kSpec:
      return "spec";
  }
  return "?";
}

GridMode ParseGridMode(std::string_view name) {
  if (name == "time+spec") return GridMode::kTimeSpec;
  if (name == "time") return GridMode::kTime;
  if (name == "spec") return GridMode::kSpec;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown grid mode '" + std::string(name) + "'");
}

AggregatedSequence GridAggregate(const EmbeddingGrid& grid, GridMode mode) {
  const int t_steps = grid.time_steps;
  const int patches = grid.spec_patches;
  const int dim = grid.dim;
  if (t_steps < 1 || patches < 1 || dim < 1 ||
      grid.values.size() != static_cast<std::size_t>(t_steps) * patches * dim) {
    throw Error(ErrorCode::kShapeMismatch, "malformed embedding grid");
  }

  AggregatedSequence out;
  switch (mode) {
    case GridMode::kTimeSpec:
      out.values = Eigen::Map<const FrameMatrix>(grid.values.data(),
                                                 t_steps * patches, dim);
      break;
    case GridMode::kTime:
      out.values.resize(t_steps, dim);
      for (int t = 0; t < t_steps; ++t) {
        for (int d = 0; d < dim; ++d) {
          double sum = 0.0;
          for (int f = 0; f < patches; ++f) sum += grid.at(t, f, d);
          out.values(t, d) = static_cast<float>(sum / patches);
        }
      }
      break;
    case GridMode::kSpec:
      out.temporal = false;
      out.values.resize(patches, dim);
      for (int f = 0; f < patches; ++f) {
        for (int d = 0; d < dim; ++d) {
          double sum = 0.0;
          for (int t = 0; t < t_steps; ++t) sum += grid.at(t, f, d);
          out.values(f, d) = static_cast<float>(sum / t_steps);
        }
      }
      break;
  }
  return out;
}

EmbeddingGrid GridFromFlattened(const EmbeddingSequence& seq, int spec_patches) {
  if (spec_patches < 1 || seq.values.rows() % spec_patches != 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "segment " + std::to_string(seq.segment_id) + ": " +
                    std::to_string(seq.values.rows()) +
                    " rows do not split into patches of " +
                    std::to_string(spec_patches));
  }
  EmbeddingGrid grid;
  grid.segment_id = seq.segment_id;
  grid.time_steps = static_cast<int>(seq.values.rows()) / spec_patches;
  grid.spec_patches = spec_patches;
  grid.dim = static_cast<int>(seq.values.cols());
  grid.values.assign(seq.values.data(), seq.values.data() + seq.values.size());
  return grid;
}

}  // namespace callprobe::store
