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

#ifndef CALLPROBE_PROBE_LOSS_H_
#define CALLPROBE_PROBE_LOSS_H_

#include <Eigen/Dense>

namespace callprobe::probe {

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd grad;  // d(loss)/d(logits)
};

// -log softmax(logits)[target] with max subtraction; gradient is
// softmax(logits) - onehot(target).
LossAndGradient SoftmaxCrossEntropy(const Eigen::VectorXd& logits, int target);

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_LOSS_H_
