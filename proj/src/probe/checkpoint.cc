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

#include "callprobe/probe/checkpoint.h"

#include <array>
#include <fstream>
#include <string>

#include "callprobe/common/byte_io.h"
#include "callprobe/common/error.h"

namespace callprobe::probe {
namespace {

constexpr std::array<char, 4> kMagic = {'P', 'R', 'B', 'C'};
constexpr std::uint32_t kFloat64 = 1;

}  // namespace

std::filesystem::path CheckpointHeaderPath(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

nlohmann::json ToJson(const TrainTrace& trace) {
  return {{"train_loss", trace.train_loss},
          {"dev_loss", trace.dev_loss},
          {"best_epoch", trace.best_epoch},
          {"stop_epoch", trace.stop_epoch},
          {"stop_reason", StopReasonName(trace.reason)},
          {"non_finite", trace.non_finite}};
}

TrainTrace TrainTraceFromJson(const nlohmann::json& j) {
  TrainTrace t;
  t.train_loss = j.at("train_loss").get<std::vector<double>>();
  t.dev_loss = j.at("dev_loss").get<std::vector<double>>();
  t.best_epoch = j.at("best_epoch").get<int>();
  t.stop_epoch = j.at("stop_epoch").get<int>();
  t.reason = ParseStopReason(j.at("stop_reason").get<std::string>());
  t.non_finite = j.value("non_finite", false);
  return t;
}

void SaveCheckpoint(const std::filesystem::path& path, const ProbeModel& model,
                    const TrainTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  LittleEndianWriter w(out);
  const ModelParams& params = model.params();
  w.WriteBytes(kMagic);
  w.WriteU32(kCheckpointVersion);
  w.WriteU32(kFloat64);
  w.WriteU32(static_cast<std::uint32_t>(params.size()));
  nlohmann::json tensors = nlohmann::json::array();
  for (const Tensor& t : params.tensors()) {
    w.WriteU32(static_cast<std::uint32_t>(t.value.rows()));
    w.WriteU32(static_cast<std::uint32_t>(t.value.cols()));
    for (Eigen::Index i = 0; i < t.value.size(); ++i) w.WriteF64(t.value.data()[i]);
    tensors.push_back(
        {{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());

  const nlohmann::json header = {{"version", kCheckpointVersion},
                                 {"dtype", "float64"},
                                 {"config", ToJson(model.config())},
                                 {"input_dim", model.input_dim()},
                                 {"num_classes", model.num_classes()},
                                 {"tensors", std::move(tensors)},
                                 {"trace", ToJson(trace)}};
  const std::filesystem::path header_path = CheckpointHeaderPath(path);
  std::ofstream hout(header_path);
  if (!hout) throw Error(ErrorCode::kIoError, "cannot create " + header_path.string());
  hout << header.dump(2) << '\n';
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  const std::filesystem::path header_path = CheckpointHeaderPath(path);
  std::ifstream hin(header_path);
  if (!hin) throw Error(ErrorCode::kIoError, "cannot open " + header_path.string());
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hin);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, header_path.string() + ": " + e.what());
  }
  ProbeModel model(ProbeConfigFromJson(header.at("config")),
                   header.at("input_dim").get<int>(),
                   header.at("num_classes").get<int>());

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  LittleEndianReader r(in, path.string());
  std::array<char, 4> magic;
  r.ReadBytes(magic, "magic");
  if (magic != kMagic) {
    throw Error(ErrorCode::kFormatError, path.string() + ": bad magic at byte offset 0");
  }
  if (const std::uint32_t v = r.ReadU32("version"); v != kCheckpointVersion) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": unsupported version " + std::to_string(v));
  }
  if (r.ReadU32("dtype") != kFloat64) {
    throw Error(ErrorCode::kFormatError, path.string() + ": unsupported dtype");
  }
  ModelParams& params = model.params();
  if (r.ReadU32("tensor count") != params.size()) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": tensor count disagrees with the header");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    Eigen::MatrixXd& value = params[k].value;
    const std::uint32_t rows = r.ReadU32("rows");
    const std::uint32_t cols = r.ReadU32("cols");
    if (rows != value.rows() || cols != value.cols()) {
      throw Error(ErrorCode::kFormatError,
                  path.string() + ": tensor " + params[k].name + " is " +
                      std::to_string(rows) + " x " + std::to_string(cols) +
                      " at byte offset " + std::to_string(r.offset()));
    }
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      value.data()[i] = r.ReadF64("tensor value");
    }
  }
  if (!r.AtEnd()) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": trailing bytes at byte offset " +
                    std::to_string(r.offset()));
  }
  return {std::move(model), TrainTraceFromJson(header.at("trace"))};
}

}  // namespace callprobe::probe
