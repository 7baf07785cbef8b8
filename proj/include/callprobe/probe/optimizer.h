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

#ifndef CALLPROBE_PROBE_OPTIMIZER_H_
#define CALLPROBE_PROBE_OPTIMIZER_H_

#include <cstdint>

#include "callprobe/probe/model.h"

namespace callprobe::probe {

// Bias-corrected Adam, constant learning rate, no weight decay.
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& like, double learning_rate, double beta1,
                double beta2, double epsilon);
  explicit AdamOptimizer(const ModelParams& like, const ProbeConfig& config)
      : AdamOptimizer(like, config.learning_rate, config.beta1, config.beta2,
                      config.epsilon) {}

  // Throws kNonFiniteGradient without touching `params` or the moments if
  // any gradient entry is NaN or infinite.
  void Step(const ModelParams& grads, ModelParams* params);

  std::int64_t step_count() const { return step_; }
  const ModelParams& first_moment() const { return m_; }
  const ModelParams& second_moment() const { return v_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  std::int64_t step_ = 0;
  ModelParams m_;
  ModelParams v_;
};

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_OPTIMIZER_H_
