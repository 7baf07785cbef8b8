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

#ifndef CALLPROBE_PROBE_MODEL_H_
#define CALLPROBE_PROBE_MODEL_H_

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "callprobe/probe/probe_config.h"
#include "callprobe/store/embedding_store.h"

namespace callprobe::probe {

struct Tensor {
  std::string name;
  Eigen::MatrixXd value;
};

// Every trainable tensor of a probe, in a fixed family-specific order.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(std::vector<Tensor> tensors)
      : tensors_(std::move(tensors)) {}

  std::size_t size() const { return tensors_.size(); }
  Tensor& operator[](std::size_t i) { return tensors_[i]; }
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  const std::vector<Tensor>& tensors() const { return tensors_; }

  Eigen::Index ScalarCount() const;
  // Same names and shapes, all zeros.
  ModelParams ZerosLike() const;
  void SetZero();
  bool AllFinite() const;

  // Concatenation of every tensor in column-major order.
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd& flat);

 private:
  std::vector<Tensor> tensors_;
};

// Intermediate values from a training-mode forward pass. Column t+1 of
// `hidden[l]` is layer l's state after step t; column 0 is the zero state.
struct ForwardCache {
  Eigen::MatrixXd input;                  // T x D as given
  std::vector<Eigen::MatrixXd> layer_in;  // per layer: in_dim x T (after dropout)
  std::vector<Eigen::MatrixXd> masks;     // per layer > 0: in_dim x T, scaled
  std::vector<Eigen::MatrixXd> hidden;    // per layer: H x (T+1)
  std::vector<Eigen::MatrixXd> cell;      // LSTM: H x (T+1)
  std::vector<Eigen::MatrixXd> gates;     // per layer: (G*H) x T activations
  std::vector<Eigen::MatrixXd> recurrent_candidate;  // GRU: W_hn h + b_hn, H x T

  // MLP: pre-activations, activations and dropout masks of both hidden layers.
  Eigen::VectorXd mlp_pre[2];
  Eigen::VectorXd mlp_act[2];
  Eigen::VectorXd mlp_mask[2];

  Eigen::VectorXd readout;  // vector fed to the output layer
};

// A probe classifier: configuration, shapes and parameters.
//
// Inputs are matrices with one row per frame. Flat families (LR, MLP) take a
// single row (the mean-pooled embedding); recurrent families take the whole
// sequence in temporal order and read out the final hidden state.
class ProbeModel {
 public:
  // All parameters start at zero; call Initialize() for a random start.
  ProbeModel(const ProbeConfig& config, int input_dim, int num_classes);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, LSTM
  // forget-gate bias +1.
  void Initialize(std::mt19937_64& rng);

  const ProbeConfig& config() const { return config_; }
  int input_dim() const { return input_dim_; }
  int num_classes() const { return num_classes_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  // Returns C logits. In train mode dropout masks are drawn from `rng`
  // (required when dropout > 0) and, if `cache` is non-null, everything
  // Backward() needs is stored there. Throws kShapeMismatch on bad input.
  Eigen::VectorXd Forward(const Eigen::MatrixXd& x, bool train_mode = false,
                          std::mt19937_64* rng = nullptr,
                          ForwardCache* cache = nullptr) const;

  // Adds d(loss)/d(params) to `grads` (shaped like params()).
  void Backward(const ForwardCache& cache, const Eigen::VectorXd& dlogits,
                ModelParams* grads) const;

 private:
  struct LayerSlots {
    int w_ih = -1;
    int w_hh = -1;
    int b_ih = -1;
    int b_hh = -1;  // GRU only
    int in_dim = 0;
  };

  void ForwardLayer(int layer, const Eigen::MatrixXd& in, ForwardCache* c) const;
  Eigen::MatrixXd BackwardLayer(int layer, const ForwardCache& c,
                                const Eigen::MatrixXd& dh_ext,
                                ModelParams* grads) const;
  Eigen::VectorXd ForwardMlp(const Eigen::VectorXd& x, bool train_mode,
                             std::mt19937_64* rng, ForwardCache* c) const;

  ProbeConfig config_;
  int input_dim_;
  int num_classes_;
  ModelParams params_;
  std::vector<LayerSlots> layers_;
  int out_w_ = -1;
  int out_b_ = -1;
};

// Turns a stored sequence into model input: the frame mean (1 x D) for flat
// families, the full sequence for recurrent ones. Recurrent families reject
// non-temporal sequences with kNonTemporalInput.
Eigen::MatrixXd PrepareInput(ProbeFamily family,
                             const store::FrameMatrix& frames, bool temporal);

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_MODEL_H_
