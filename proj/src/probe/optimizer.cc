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

#include "callprobe/probe/optimizer.h"

#include <cmath>

#include "callprobe/common/error.h"

namespace callprobe::probe {

AdamOptimizer::AdamOptimizer(const ModelParams& like, double learning_rate,
                             double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(like.ZerosLike()),
      v_(like.ZerosLike()) {}

void AdamOptimizer::Step(const ModelParams& grads, ModelParams* params) {
  if (grads.size() != m_.size() || params->size() != m_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer tensor count mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!grads[i].value.allFinite()) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "non-finite gradient in " + grads[i].name);
    }
  }
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const Eigen::MatrixXd& g = grads[i].value;
    Eigen::MatrixXd& m = m_[i].value;
    Eigen::MatrixXd& v = v_[i].value;
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    (*params)[i].value.array() -=
        lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

}  // namespace callprobe::probe
