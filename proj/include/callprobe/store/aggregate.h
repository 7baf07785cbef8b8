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

#ifndef CALLPROBE_STORE_AGGREGATE_H_
#define CALLPROBE_STORE_AGGREGATE_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "callprobe/common/error.h"
#include "callprobe/store/embedding_store.h"

namespace callprobe::store {

// Column means over frames, accumulated in double in frame order.
template <typename Derived>
Eigen::VectorXd MeanPool(const Eigen::MatrixBase<Derived>& frames) {
  const Eigen::Index rows = frames.rows();
  if (rows == 0) {
    throw Error(ErrorCode::kEmptySequence, "mean pool over zero frames");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(frames.cols());
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (Eigen::Index d = 0; d < frames.cols(); ++d) {
      sum[d] += static_cast<double>(frames(t, d));
    }
  }
  return sum / static_cast<double>(rows);
}

// time x spectral-patch x dim tensor, values laid out time-major.
struct EmbeddingGrid {
  std::uint64_t segment_id = 0;
  int time_steps = 0;
  int spec_patches = 0;
  int dim = 0;
  std::vector<float> values;

  float at(int t, int f, int d) const {
    return values[(static_cast<std::size_t>(t) * spec_patches + f) * dim + d];
  }
};

enum class GridMode { kTimeSpec, kTime, kSpec };

std::string_view GridModeName(GridMode mode);
// Accepts "time+spec", "time", "spec"; throws kInvalidArgument otherwise.
GridMode ParseGridMode(std::string_view name);

struct AggregatedSequence {
  FrameMatrix values;
  // False for kSpec: rows are spectral patches, not time steps.
  bool temporal = true;
};

// kTimeSpec flattens to (T*F) x D with time outer, patch inner; kTime
// averages over patches (T x D); kSpec averages over time (F x D).
AggregatedSequence GridAggregate(const EmbeddingGrid& grid, GridMode mode);

// Rebuilds a grid from a flattened (T*F) x D record.
EmbeddingGrid GridFromFlattened(const EmbeddingSequence& seq, int spec_patches);

}  // namespace callprobe::store

#endif  // CALLPROBE_STORE_AGGREGATE_H_
