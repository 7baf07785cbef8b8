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

#include "callprobe/probe/trainer.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "callprobe/common/error.h"
#include "callprobe/probe/loss.h"
#include "callprobe/probe/optimizer.h"

namespace callprobe::probe {

double MeanLoss(const ProbeModel& model, std::span<const Example> examples) {
  if (examples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "loss over an empty set");
  }
  double sum = 0.0;
  for (const Example& ex : examples) {
    sum += SoftmaxCrossEntropy(model.Forward(ex.input), ex.label).loss;
  }
  return sum / static_cast<double>(examples.size());
}

TrainResult TrainProbe(std::span<const Example> train,
                       std::span<const Example> dev, const ProbeConfig& config,
                       int num_classes) {
  if (train.empty() || dev.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "training needs non-empty train and dev sets");
  }
  const int input_dim = static_cast<int>(train.front().input.cols());
  ProbeModel model(config, input_dim, num_classes);
  std::mt19937_64 rng(config.seed);
  model.Initialize(rng);

  AdamOptimizer adam(model.params(), config);
  EpochMonitor monitor(config.patience, config.convergence_tolerance,
                       config.max_epochs);
  TrainTrace trace;
  ModelParams best = model.params();
  ModelParams grads = model.params().ZerosLike();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ForwardCache cache;

  for (;;) {
    std::shuffle(order.begin(), order.end(), rng);
    bool aborted = false;
    for (std::size_t start = 0; start < order.size() && !aborted;
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      grads.SetZero();
      for (std::size_t k = start; k < stop; ++k) {
        const Example& ex = train[order[k]];
        const Eigen::VectorXd logits = model.Forward(ex.input, true, &rng, &cache);
        model.Backward(cache, SoftmaxCrossEntropy(logits, ex.label).grad, &grads);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = 0; i < grads.size(); ++i) grads[i].value *= scale;
      try {
        adam.Step(grads, &model.params());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNonFiniteGradient) throw;
        aborted = true;
      }
    }
    if (aborted) {
      trace.non_finite = true;
      trace.reason = StopReason::kDiverged;
      trace.stop_epoch = monitor.epochs_seen() + 1;
      break;
    }
    trace.train_loss.push_back(MeanLoss(model, train));
    trace.dev_loss.push_back(MeanLoss(model, dev));
    const auto reason =
        monitor.Observe(trace.train_loss.back(), trace.dev_loss.back());
    if (monitor.improved()) best = model.params();
    if (reason) {
      trace.reason = *reason;
      trace.stop_epoch = monitor.epochs_seen();
      break;
    }
  }
  trace.best_epoch = monitor.best_epoch();
  model.params() = std::move(best);
  return {std::move(model), std::move(trace)};
}

}  // namespace callprobe::probe
