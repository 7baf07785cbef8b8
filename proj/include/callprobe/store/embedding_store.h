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

#ifndef CALLPROBE_STORE_EMBEDDING_STORE_H_
#define CALLPROBE_STORE_EMBEDDING_STORE_H_

// Embedding store: a binary payload plus a JSON manifest with the same stem.
//
// Payload (all integers and floats little-endian):
//   "EMBS" | u32 version (=1) | u32 dim | u32 dtype (0 = float32) | u64 count
//   count x ( u64 segment_id | u32 frames | frames*dim float32, frame-major )
//
// Manifest keys: version, dim, dtype, layer_tag, temporal, classes,
// segments[] (segment_id, label, fold, recording_id, start, end, frames,
// overlapping_labels) and, for stores holding flattened time x spectral
// grids, grid_spec_patches.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "callprobe/common/byte_io.h"

namespace callprobe::store {

using FrameMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::uint32_t kStoreVersion = 1;
inline constexpr std::uint32_t kDtypeFloat32 = 0;

struct EmbeddingSequence {
  std::uint64_t segment_id = 0;
  FrameMatrix values;  // T x D
};

struct SegmentEntry {
  std::uint64_t segment_id = 0;
  int label = 0;
  int fold = 0;
  std::string recording_id;
  double start = 0.0;
  double end = 0.0;
  std::uint32_t frames = 0;
  std::vector<int> overlapping_labels;

  friend bool operator==(const SegmentEntry&, const SegmentEntry&) = default;
};

struct StoreManifest {
  std::uint32_t version = kStoreVersion;
  std::uint32_t dim = 0;
  std::string dtype = "float32";
  std::string layer_tag = "final";
  // False once the frame order carries no temporal meaning.
  bool temporal = true;
  // Non-zero when each record is a flattened (time x patches) grid.
  std::uint32_t grid_spec_patches = 0;
  std::vector<std::string> classes;
  // Same order as the payload records.
  std::vector<SegmentEntry> segments;

  friend bool operator==(const StoreManifest&, const StoreManifest&) = default;
};

// foo.embs -> foo.json
std::filesystem::path ManifestPathFor(const std::filesystem::path& store_path);

void WriteManifest(const std::filesystem::path& path, const StoreManifest& m);
StoreManifest ReadManifest(const std::filesystem::path& path);

// Streams records to disk; the record count in the header is patched by
// Finish(). One writer per file.
class StoreWriter {
 public:
  StoreWriter(const std::filesystem::path& path, std::uint32_t dim);
  ~StoreWriter();
  StoreWriter(const StoreWriter&) = delete;
  StoreWriter& operator=(const StoreWriter&) = delete;

  // Throws kDimMismatch, kEmptySequence or kNonFiniteValue.
  void Append(const EmbeddingSequence& seq);

  // Checks the manifest against the written records, then writes it next to
  // the payload. Throws kFormatError on disagreement.
  void Finish(const StoreManifest& manifest);

 private:
  std::filesystem::path path_;
  std::uint32_t dim_;
  std::ofstream out_;
  LittleEndianWriter writer_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> written_;
  bool finished_ = false;
};

// Reads one record at a time. Every record is validated against the manifest
// (id, frame count) and for finiteness.
class StoreReader {
 public:
  explicit StoreReader(const std::filesystem::path& path);

  const StoreManifest& manifest() const { return manifest_; }
  std::uint32_t dim() const { return dim_; }
  std::uint64_t record_count() const { return count_; }

  // Returns nullopt after the last record; throws kFormatError on truncation
  // or trailing bytes, kNonFiniteValue on NaN/Inf.
  std::optional<EmbeddingSequence> Next();

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  LittleEndianReader reader_;
  StoreManifest manifest_;
  std::uint32_t dim_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t next_index_ = 0;
};

struct Store {
  StoreManifest manifest;
  std::vector<EmbeddingSequence> sequences;
};

// Convenience wrappers over StoreWriter / StoreReader.
void WriteStore(const std::filesystem::path& path,
                std::span<const EmbeddingSequence> sequences,
                const StoreManifest& manifest);
Store ReadStore(const std::filesystem::path& path);

}  // namespace callprobe::store

#endif  // CALLPROBE_STORE_EMBEDDING_STORE_H_
