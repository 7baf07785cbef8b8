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

#include "callprobe/probe/loss.h"

#include <cmath>
#include <string>

#include "callprobe/common/error.h"

namespace callprobe::probe {

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits) {
  const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

LossAndGradient SoftmaxCrossEntropy(const Eigen::VectorXd& logits, int target) {
  if (logits.size() < 2 || target < 0 || target >= logits.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "target " + std::to_string(target) + " out of range for " +
                    std::to_string(logits.size()) + " logits");
  }
  const double m = logits.maxCoeff();
  const Eigen::ArrayXd shifted = logits.array() - m;
  const double log_sum = std::log(shifted.exp().sum());
  LossAndGradient out;
  out.loss = log_sum - shifted[target];
  out.grad = (shifted - log_sum).exp().matrix();
  out.grad[target] -= 1.0;
  return out;
}

}  // namespace callprobe::probe
