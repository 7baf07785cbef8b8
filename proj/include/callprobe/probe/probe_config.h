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

#ifndef CALLPROBE_PROBE_PROBE_CONFIG_H_
#define CALLPROBE_PROBE_PROBE_CONFIG_H_

#include <cstdint>
#include <string_view>

#include <json.hpp>

namespace callprobe::probe {

enum class ProbeFamily { kLogistic, kMlp, kElman, kGru, kLstm };

// "lr", "mlp", "elman", "gru", "lstm".
std::string_view FamilyName(ProbeFamily family);
ProbeFamily ParseFamily(std::string_view name);
bool IsRecurrent(ProbeFamily family);

// One hyperparameter point. num_layers and hidden only apply to recurrent
// families; dropout applies between stacked recurrent layers and after each
// MLP hidden layer.
struct ProbeConfig {
  ProbeFamily family = ProbeFamily::kLogistic;
  int num_layers = 1;
  int hidden = 64;
  double dropout = 0.0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;
  int max_epochs = 100;
  int patience = 3;
  double convergence_tolerance = 1e-6;
  std::uint64_t seed = 0;

  // Throws kInvalidArgument on out-of-range fields.
  void Validate() const;

  friend bool operator==(const ProbeConfig&, const ProbeConfig&) = default;
};

nlohmann::json ToJson(const ProbeConfig& cfg);
ProbeConfig ProbeConfigFromJson(const nlohmann::json& j);

}  // namespace callprobe::probe

#endif  // CALLPROBE_PROBE_PROBE_CONFIG_H_
