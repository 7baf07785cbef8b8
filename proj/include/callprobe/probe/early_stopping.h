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

#ifndef CALLPROBE_PROBE_EARLY_STOPPING_H_
#define CALLPROBE_PROBE_EARLY_STOPPING_H_

#include <optional>
#include <string_view>

namespace callprobe::probe {

enum class StopReason { kConverged, kDiverged, kMaxEpochs };

// "converged", "diverged", "max_epochs".
std::string_view StopReasonName(StopReason reason);
StopReason ParseStopReason(std::string_view name);

// Watches the train and dev loss after each epoch. Each series keeps a run
// length of "unchanged" epochs (|delta| < tolerance) and of "increased"
// epochs (delta >= tolerance); any other delta resets both. Training stops
// once either run exceeds `patience` in either series, or at max_epochs.
class EpochMonitor {
 public:
  EpochMonitor(int patience, double tolerance, int max_epochs);

  // Records one epoch; returns the stop reason if training should end now.
  std::optional<StopReason> Observe(double train_loss, double dev_loss);

  int epochs_seen() const { return epoch_; }
  // 1-based epoch with the strictly lowest dev loss so far (first one on
  // ties); 0 before any epoch.
  int best_epoch() const { return best_epoch_; }
  double best_dev_loss() const { return best_dev_; }
  // True if the epoch just observed became the new best.
  bool improved() const { return improved_; }

 private:
  struct Series {
    bool has_prev = false;
    double prev = 0.0;
    int unchanged = 0;
    int increased = 0;
  };
  std::optional<StopReason> Update(Series& s, double value) const;

  int patience_;
  double tolerance_;
  int max_epochs_;
  int epoch_ = 0;
  int best_epoch_ = 0;
  double best_dev_ = 0.0;
  bool improved_ = false;
  Series train_;
  Series dev_;
};

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_EARLY_STOPPING_H_
