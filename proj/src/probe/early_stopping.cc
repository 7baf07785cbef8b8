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

#include "callprobe/probe/early_stopping.h"

#include <cmath>
#include <string>

#include "callprobe/common/error.h"

namespace callprobe::probe {

std::string_view StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kDiverged:
      return "diverged";
    case StopReason::kMaxEpochs:
      return "max_epochs";
  }
  return "?";
}

StopReason ParseStopReason(std::string_view name) {
  for (StopReason r : {StopReason::kConverged, StopReason::kDiverged,
                       StopReason::kMaxEpochs}) {
    if (name == StopReasonName(r)) return r;
  }
  throw Error(ErrorCode::kParseError,
              "unknown stop reason '" + std::string(name) + "'");
}

EpochMonitor::EpochMonitor(int patience, double tolerance, int max_epochs)
    : patience_(patience), tolerance_(tolerance), max_epochs_(max_epochs) {}

std::optional<StopReason> EpochMonitor::Update(Series& s, double value) const {
  if (!std::isfinite(value)) return StopReason::kDiverged;
  if (s.has_prev) {
    const double delta = value - s.prev;
    if (std::abs(delta) < tolerance_) {
      ++s.unchanged;
      s.increased = 0;
    } else if (delta >= tolerance_) {
      ++s.increased;
      s.unchanged = 0;
    } else {
      s.unchanged = 0;
      s.increased = 0;
    }
  }
  s.has_prev = true;
  s.prev = value;
  if (s.increased > patience_) return StopReason::kDiverged;
  if (s.unchanged > patience_) return StopReason::kConverged;
  return std::nullopt;
}

std::optional<StopReason> EpochMonitor::Observe(double train_loss,
                                                double dev_loss) {
  ++epoch_;
  improved_ = false;
  if (std::isfinite(dev_loss) && (best_epoch_ == 0 || dev_loss < best_dev_)) {
    best_dev_ = dev_loss;
    best_epoch_ = epoch_;
    improved_ = true;
  }
  const std::optional<StopReason> a = Update(train_, train_loss);
  const std::optional<StopReason> b = Update(dev_, dev_loss);
  // Divergence wins when both series trigger on the same epoch.
  if (a == StopReason::kDiverged || b == StopReason::kDiverged) {
    return StopReason::kDiverged;
  }
  if (a || b) return StopReason::kConverged;
  if (epoch_ >= max_epochs_) return StopReason::kMaxEpochs;
  return std::nullopt;
}

}  // namespace callprobe::probe
