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

#include "callprobe/probe/probe_config.h"

#include <algorithm>
#include <cctype>
#include <string>

#include "callprobe/common/error.h"

namespace callprobe::probe {

std::string_view FamilyName(ProbeFamily family) {
  switch (family) {
    case ProbeFamily::kLogistic:
      return "lr";
    case ProbeFamily::kMlp:
      return "mlp";
    case ProbeFamily::kElman:
      return "elman";
    case ProbeFamily::kGru:
      return "gru";
    case ProbeFamily::kLstm:
      return "lstm";
  }
  return "?";
}

ProbeFamily ParseFamily(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (ProbeFamily f : {ProbeFamily::kLogistic, ProbeFamily::kMlp,
                        ProbeFamily::kElman, ProbeFamily::kGru,
                        ProbeFamily::kLstm}) {
    if (lower == FamilyName(f)) return f;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown probe family '" + std::string(name) + "'");
}

bool IsRecurrent(ProbeFamily family) {
  return family == ProbeFamily::kElman || family == ProbeFamily::kGru ||
         family == ProbeFamily::kLstm;
}

void ProbeConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(learning_rate > 0.0, "learning rate must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must be in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must be in [0, 1)");
  require(epsilon > 0.0, "epsilon must be positive");
  require(batch_size >= 1, "batch size must be >= 1");
  require(max_epochs >= 1, "max_epochs must be >= 1");
  require(patience >= 0, "patience must be >= 0");
  require(convergence_tolerance >= 0.0, "tolerance must be >= 0");
  if (IsRecurrent(family)) {
    require(num_layers >= 1, "recurrent probes need at least one layer");
    require(hidden >= 1, "hidden size must be >= 1");
  }
}

nlohmann::json ToJson(const ProbeConfig& cfg) {
  return {{"family", FamilyName(cfg.family)},
          {"num_layers", cfg.num_layers},
          {"hidden", cfg.hidden},
          {"dropout", cfg.dropout},
          {"learning_rate", cfg.learning_rate},
          {"beta1", cfg.beta1},
          {"beta2", cfg.beta2},
          {"epsilon", cfg.epsilon},
          {"weight_decay", 0.0},
          {"batch_size", cfg.batch_size},
          {"max_epochs", cfg.max_epochs},
          {"patience", cfg.patience},
          {"convergence_tolerance", cfg.convergence_tolerance},
          {"seed", cfg.seed}};
}

ProbeConfig ProbeConfigFromJson(const nlohmann::json& j) {
  ProbeConfig cfg;
  cfg.family = ParseFamily(j.at("family").get<std::string>());
  cfg.num_layers = j.value("num_layers", cfg.num_layers);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.dropout = j.value("dropout", cfg.dropout);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.patience = j.value("patience", cfg.patience);
  cfg.convergence_tolerance =
      j.value("convergence_tolerance", cfg.convergence_tolerance);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

}  // namespace callprobe::probe
