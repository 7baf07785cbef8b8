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

#ifndef CALLPROBE_PROBE_TRAINER_H_
#define CALLPROBE_PROBE_TRAINER_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "callprobe/probe/early_stopping.h"
#include "callprobe/probe/model.h"

namespace callprobe::probe {

// One training or evaluation item, already shaped for the probe family
// (see PrepareInput).
struct Example {
  Eigen::MatrixXd input;
  int label = 0;
};

struct TrainTrace {
  std::vector<double> train_loss;  // per epoch, eval mode, full pass
  std::vector<double> dev_loss;
  int best_epoch = 0;  // 1-based; 0 if no epoch finished
  int stop_epoch = 0;
  StopReason reason = StopReason::kMaxEpochs;
  bool non_finite = false;  // a step was aborted on a non-finite gradient

  double best_dev_loss() const {
    return best_epoch > 0 ? dev_loss[best_epoch - 1] : 0.0;
  }
};

struct TrainResult {
  ProbeModel model;  // parameters from the best dev epoch
  TrainTrace trace;
};

// Mean cross-entropy of `model` over `examples` in eval mode.
double MeanLoss(const ProbeModel& model, std::span<const Example> examples);

// Minibatch Adam training with per-epoch shuffling and early stopping. All
// randomness (init, shuffles, dropout) comes from one generator seeded with
// config.seed, so a run is reproducible bit for bit. A non-finite gradient
// ends training as diverged.
TrainResult TrainProbe(std::span<const Example> train,
                       std::span<const Example> dev, const ProbeConfig& config,
                       int num_classes);

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_TRAINER_H_
