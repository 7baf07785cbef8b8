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

#include "callprobe/store/embedding_store.h"

#include <array>
#include <cmath>
#include <set>

#include <json.hpp>

#include "callprobe/common/error.h"

namespace callprobe::store {
namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', 'S'};
constexpr std::uint64_t kCountOffset = 16;

void CheckFinite(const EmbeddingSequence& seq, const std::string& where) {
  for (Eigen::Index i = 0; i < seq.values.size(); ++i) {
    if (!std::isfinite(seq.values.data()[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  where + ": segment " + std::to_string(seq.segment_id) +
                      " has a non-finite value at element " + std::to_string(i));
    }
  }
}

nlohmann::json ToJson(const StoreManifest& m) {
  nlohmann::json segments = nlohmann::json::array();
  for (const SegmentEntry& s : m.segments) {
    segments.push_back({{"segment_id", s.segment_id},
                        {"label", s.label},
                        {"fold", s.fold},
                        {"recording_id", s.recording_id},
                        {"start", s.start},
                        {"end", s.end},
                        {"frames", s.frames},
                        {"overlapping_labels", s.overlapping_labels}});
  }
  nlohmann::json j = {{"version", m.version},   {"dim", m.dim},
                      {"dtype", m.dtype},       {"layer_tag", m.layer_tag},
                      {"temporal", m.temporal}, {"classes", m.classes},
                      {"segments", std::move(segments)}};
  if (m.grid_spec_patches > 0) j["grid_spec_patches"] = m.grid_spec_patches;
  return j;
}

StoreManifest FromJson(const nlohmann::json& j) {
  StoreManifest m;
  m.version = j.at("version").get<std::uint32_t>();
  m.dim = j.at("dim").get<std::uint32_t>();
  m.dtype = j.at("dtype").get<std::string>();
  m.layer_tag = j.at("layer_tag").get<std::string>();
  m.temporal = j.at("temporal").get<bool>();
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.grid_spec_patches = j.value("grid_spec_patches", std::uint32_t{0});
  for (const auto& s : j.at("segments")) {
    SegmentEntry e;
    e.segment_id = s.at("segment_id").get<std::uint64_t>();
    e.label = s.at("label").get<int>();
    e.fold = s.value("fold", 0);
    e.recording_id = s.value("recording_id", std::string());
    e.start = s.value("start", 0.0);
    e.end = s.value("end", 0.0);
    e.frames = s.at("frames").get<std::uint32_t>();
    e.overlapping_labels =
        s.value("overlapping_labels", std::vector<int>{e.label});
    m.segments.push_back(std::move(e));
  }
  return m;
}

void ValidateManifest(const StoreManifest& m, const std::string& where) {
  if (m.version != kStoreVersion) {
    throw Error(ErrorCode::kFormatError,
                where + ": unsupported manifest version " +
                    std::to_string(m.version));
  }
  if (m.dtype != "float32") {
    throw Error(ErrorCode::kFormatError, where + ": unsupported dtype " + m.dtype);
  }
  std::set<std::uint64_t> ids;
  for (const SegmentEntry& s : m.segments) {
    if (!ids.insert(s.segment_id).second) {
      throw Error(ErrorCode::kFormatError,
                  where + ": duplicate segment id " +
                      std::to_string(s.segment_id));
    }
  }
}

}  // namespace

std::filesystem::path ManifestPathFor(const std::filesystem::path& store_path) {
  std::filesystem::path p = store_path;
  p.replace_extension(".json");
  return p;
}

void WriteManifest(const std::filesystem::path& path, const StoreManifest& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out << ToJson(m).dump(2) << "\n";
}

StoreManifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    StoreManifest m = FromJson(nlohmann::json::parse(in));
    ValidateManifest(m, path.string());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

StoreWriter::StoreWriter(const std::filesystem::path& path, std::uint32_t dim)
    : path_(path),
      dim_(dim),
      out_(path, std::ios::binary | std::ios::trunc),
      writer_(out_) {
  if (!out_) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  if (dim == 0) throw Error(ErrorCode::kDimMismatch, "store dim must be > 0");
  writer_.WriteBytes(kMagic);
  writer_.WriteU32(kStoreVersion);
  writer_.WriteU32(dim_);
  writer_.WriteU32(kDtypeFloat32);
  writer_.WriteU64(0);
}

StoreWriter::~StoreWriter() = default;

void StoreWriter::Append(const EmbeddingSequence& seq) {
  if (finished_) {
    throw Error(ErrorCode::kInvalidArgument, "append after Finish()");
  }
  if (seq.values.cols() != dim_) {
    throw Error(ErrorCode::kDimMismatch,
                "segment " + std::to_string(seq.segment_id) + " has dim " +
                    std::to_string(seq.values.cols()) + ", store dim is " +
                    std::to_string(dim_));
  }
  if (seq.values.rows() == 0) {
    throw Error(ErrorCode::kEmptySequence,
                "segment " + std::to_string(seq.segment_id) + " has no frames");
  }
  CheckFinite(seq, path_.string());
  const auto frames = static_cast<std::uint32_t>(seq.values.rows());
  writer_.WriteU64(seq.segment_id);
  writer_.WriteU32(frames);
  for (Eigen::Index i = 0; i < seq.values.size(); ++i) {
    writer_.WriteF32(seq.values.data()[i]);
  }
  written_.emplace_back(seq.segment_id, frames);
}

void StoreWriter::Finish(const StoreManifest& manifest) {
  ValidateManifest(manifest, path_.string());
  if (manifest.dim != dim_) {
    throw Error(ErrorCode::kDimMismatch, "manifest dim " +
                                             std::to_string(manifest.dim) +
                                             " != store dim " + std::to_string(dim_));
  }
  if (manifest.segments.size() != written_.size()) {
    throw Error(ErrorCode::kFormatError,
                "manifest lists " + std::to_string(manifest.segments.size()) +
                    " segments, " + std::to_string(written_.size()) +
                    " records written");
  }
  for (std::size_t i = 0; i < written_.size(); ++i) {
    const SegmentEntry& e = manifest.segments[i];
    if (e.segment_id != written_[i].first || e.frames != written_[i].second) {
      throw Error(ErrorCode::kFormatError,
                  "manifest entry " + std::to_string(i) +
                      " disagrees with record (segment " +
                      std::to_string(written_[i].first) + ")");
    }
  }
  out_.seekp(static_cast<std::streamoff>(kCountOffset));
  LittleEndianWriter patch(out_);
  patch.WriteU64(written_.size());
  out_.close();
  if (!out_) throw Error(ErrorCode::kIoError, "failed to finalize " + path_.string());
  WriteManifest(ManifestPathFor(path_), manifest);
  finished_ = true;
}

StoreReader::StoreReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary), reader_(in_, path.string()) {
  if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  manifest_ = ReadManifest(ManifestPathFor(path));

  std::array<char, 4> magic;
  reader_.ReadBytes(magic, "magic");
  if (magic != kMagic) {
    throw Error(ErrorCode::kFormatError, path.string() + ": bad magic at byte offset 0");
  }
  const std::uint32_t version = reader_.ReadU32("version");
  if (version != kStoreVersion) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": unsupported version " + std::to_string(version) +
                    " at byte offset 4");
  }
  dim_ = reader_.ReadU32("dim");
  const std::uint32_t dtype = reader_.ReadU32("dtype");
  if (dtype != kDtypeFloat32) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": unsupported dtype code " + std::to_string(dtype) +
                    " at byte offset 12");
  }
  count_ = reader_.ReadU64("record count");
  if (dim_ == 0 || dim_ != manifest_.dim) {
    throw Error(ErrorCode::kDimMismatch,
                path.string() + ": payload dim " + std::to_string(dim_) +
                    ", manifest dim " + std::to_string(manifest_.dim));
  }
  if (count_ != manifest_.segments.size()) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": payload holds " + std::to_string(count_) +
                    " records, manifest lists " +
                    std::to_string(manifest_.segments.size()));
  }
}

std::optional<EmbeddingSequence> StoreReader::Next() {
  if (next_index_ == count_) {
    if (!reader_.AtEnd()) {
      throw Error(ErrorCode::kFormatError,
                  path_.string() + ": trailing bytes at byte offset " +
                      std::to_string(reader_.offset()));
    }
    return std::nullopt;
  }
  const SegmentEntry& entry = manifest_.segments[next_index_];
  const std::uint64_t record_offset = reader_.offset();
  EmbeddingSequence seq;
  seq.segment_id = reader_.ReadU64("segment id");
  const std::uint32_t frames = reader_.ReadU32("frame count");
  if (seq.segment_id != entry.segment_id || frames != entry.frames) {
    throw Error(ErrorCode::kFormatError,
                path_.string() + ": record at byte offset " +
                    std::to_string(record_offset) + " (segment " +
                    std::to_string(seq.segment_id) +
                    ") disagrees with manifest entry " +
                    std::to_string(next_index_));
  }
  if (frames == 0) {
    throw Error(ErrorCode::kFormatError,
                path_.string() + ": zero-frame record at byte offset " +
                    std::to_string(record_offset));
  }
  seq.values.resize(frames, dim_);
  for (Eigen::Index i = 0; i < seq.values.size(); ++i) {
    seq.values.data()[i] = reader_.ReadF32("frame values");
  }
  CheckFinite(seq, path_.string());
  ++next_index_;
  return seq;
}

void WriteStore(const std::filesystem::path& path,
                std::span<const EmbeddingSequence> sequences,
                const StoreManifest& manifest) {
  if (!sequences.empty()) {
    const auto dim = sequences.front().values.cols();
    for (const EmbeddingSequence& s : sequences) {
      if (s.values.cols() != dim) {
        throw Error(ErrorCode::kDimMismatch,
                    "sequences disagree on dim (" + std::to_string(dim) +
                        " vs " + std::to_string(s.values.cols()) + ")");
      }
    }
  }
  StoreWriter writer(path, manifest.dim);
  for (const EmbeddingSequence& s : sequences) writer.Append(s);
  writer.Finish(manifest);
}

Store ReadStore(const std::filesystem::path& path) {
  StoreReader reader(path);
  Store store;
  store.manifest = reader.manifest();
  store.sequences.reserve(reader.record_count());
  while (auto seq = reader.Next()) store.sequences.push_back(std::move(*seq));
  return store;
}

}  // namespace callprobe::store
