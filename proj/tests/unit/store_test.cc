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

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "callprobe/common/error.h"
#include "callprobe/store/aggregate.h"
#include "callprobe/store/embedding_store.h"
#include "test_util.h"

namespace callprobe::store {
namespace {

using ::callprobe::testing::ScopedTempDir;

struct Fixture {
  std::vector<EmbeddingSequence> sequences;
  StoreManifest manifest;
};

Fixture MakeFixture(const std::vector<int>& frames, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, 3.0f);
  Fixture fx;
  fx.manifest.dim = dim;
  fx.manifest.layer_tag = "layer02";
  fx.manifest.classes = {"a", "b", "c"};
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EmbeddingSequence s;
    s.segment_id = 100 + i * 7;
    s.values.resize(frames[i], dim);
    for (Eigen::Index j = 0; j < s.values.size(); ++j) s.values.data()[j] = n(rng);
    SegmentEntry e;
    e.segment_id = s.segment_id;
    e.label = static_cast<int>(i % 3);
    e.fold = static_cast<int>(i % 5);
    e.recording_id = "rec" + std::to_string(i / 2);
    e.start = 0.5 * i;
    e.end = 0.5 * i + 1.25;
    e.frames = frames[i];
    e.overlapping_labels = {e.label};
    fx.manifest.segments.push_back(e);
    fx.sequences.push_back(std::move(s));
  }
  return fx;
}

bool BitEqual(const FrameMatrix& a, const FrameMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(float) * a.size()) == 0;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(EmbeddingStoreTest, RoundTripIsBitExact) {
  ScopedTempDir dir;
  const Fixture fx = MakeFixture({1, 5, 9}, 4, 1);
  const auto path = dir / "s.embs";
  WriteStore(path, fx.sequences, fx.manifest);
  EXPECT_TRUE(std::filesystem::exists(dir / "s.json"));
  const Store back = ReadStore(path);
  EXPECT_EQ(back.manifest, fx.manifest);
  ASSERT_EQ(back.sequences.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.sequences[i].segment_id, fx.sequences[i].segment_id);
    EXPECT_TRUE(BitEqual(back.sequences[i].values, fx.sequences[i].values));
  }
}

TEST(EmbeddingStoreTest, HeaderBytesFollowTheWireLayout) {
  ScopedTempDir dir;
  const Fixture fx = MakeFixture({2}, 3, 2);
  const auto path = dir / "s.embs";
  WriteStore(path, fx.sequences, fx.manifest);
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  ASSERT_EQ(bytes.size(), 24u + 12u + 2 * 3 * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "EMBS");
  EXPECT_EQ(bytes[4], 1);   // version
  EXPECT_EQ(bytes[8], 3);   // dim
  EXPECT_EQ(bytes[12], 0);  // dtype float32
  EXPECT_EQ(bytes[16], 1);  // record count
  EXPECT_EQ(bytes[24], 100);  // segment id
  EXPECT_EQ(bytes[32], 2);    // frame count
  float first;
  std::memcpy(&first, bytes.data() + 36, 4);
  EXPECT_EQ(first, fx.sequences[0].values(0, 0));
}

TEST(EmbeddingStoreTest, MixedDimIsRejectedAtWrite) {
  ScopedTempDir dir;
  Fixture fx = MakeFixture({2, 3}, 4, 3);
  fx.sequences[1].values.resize(3, 5);
  fx.sequences[1].values.setZero();
  EXPECT_EQ(CodeOf([&] { WriteStore(dir / "s.embs", fx.sequences, fx.manifest); }),
            ErrorCode::kDimMismatch);
}

TEST(EmbeddingStoreTest, NonFiniteRejectedAtWrite) {
  ScopedTempDir dir;
  Fixture fx = MakeFixture({2}, 4, 4);
  fx.sequences[0].values(1, 2) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_EQ(CodeOf([&] { WriteStore(dir / "s.embs", fx.sequences, fx.manifest); }),
            ErrorCode::kNonFiniteValue);
}

TEST(EmbeddingStoreTest, NonFiniteRejectedAtRead) {
  ScopedTempDir dir;
  const Fixture fx = MakeFixture({3}, 2, 5);
  const auto path = dir / "s.embs";
  WriteStore(path, fx.sequences, fx.manifest);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(36 + 4);  // second float of the first record
    const float inf = std::numeric_limits<float>::infinity();
    f.write(reinterpret_cast<const char*>(&inf), 4);
  }
  EXPECT_EQ(CodeOf([&] { ReadStore(path); }), ErrorCode::kNonFiniteValue);
}

TEST(EmbeddingStoreTest, TruncationReportsByteOffset) {
  ScopedTempDir dir;
  const Fixture fx = MakeFixture({1, 5, 9}, 4, 6);
  const auto path = dir / "s.embs";
  WriteStore(path, fx.sequences, fx.manifest);
  const auto full = std::filesystem::file_size(path);
  for (std::uintmax_t cut : {full - 1, full - 37, std::uintmax_t{30},
                             std::uintmax_t{10}, std::uintmax_t{0}}) {
    std::filesystem::resize_file(path, cut);
    try {
      ReadStore(path);
      FAIL() << "cut at " << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormatError);
      EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos)
          << e.what();
    }
    WriteStore(path, fx.sequences, fx.manifest);
  }
}

TEST(EmbeddingStoreTest, CorruptHeaderAndTrailingBytes) {
  ScopedTempDir dir;
  const Fixture fx = MakeFixture({2, 2}, 2, 7);
  const auto path = dir / "s.embs";

  WriteStore(path, fx.sequences, fx.manifest);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("EMBX", 4);
  }
  EXPECT_EQ(CodeOf([&] { ReadStore(path); }), ErrorCode::kFormatError);

  WriteStore(path, fx.sequences, fx.manifest);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const char v2[4] = {2, 0, 0, 0};
    f.write(v2, 4);
  }
  EXPECT_EQ(CodeOf([&] { ReadStore(path); }), ErrorCode::kFormatError);

  WriteStore(path, fx.sequences, fx.manifest);
  {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    f.write("x", 1);
  }
  EXPECT_EQ(CodeOf([&] { ReadStore(path); }), ErrorCode::kFormatError);
}

TEST(EmbeddingStoreTest, ManifestMustAgreeWithRecords) {
  ScopedTempDir dir;
  Fixture fx = MakeFixture({2, 3}, 2, 8);
  fx.manifest.segments[1].frames = 4;
  EXPECT_EQ(CodeOf([&] { WriteStore(dir / "s.embs", fx.sequences, fx.manifest); }),
            ErrorCode::kFormatError);
  fx = MakeFixture({2, 3}, 2, 8);
  fx.manifest.segments[1].segment_id = fx.manifest.segments[0].segment_id;
  EXPECT_EQ(CodeOf([&] { WriteStore(dir / "s.embs", fx.sequences, fx.manifest); }),
            ErrorCode::kFormatError);
}

TEST(EmbeddingStoreTest, StreamingReaderYieldsRecordsInOrder) {
  ScopedTempDir dir;
  const Fixture fx = MakeFixture({4, 1, 2, 6}, 3, 9);
  const auto path = dir / "s.embs";
  WriteStore(path, fx.sequences, fx.manifest);
  StoreReader reader(path);
  EXPECT_EQ(reader.record_count(), 4u);
  EXPECT_EQ(reader.manifest().layer_tag, "layer02");
  std::size_t i = 0;
  while (auto seq = reader.Next()) {
    EXPECT_TRUE(BitEqual(seq->values, fx.sequences[i].values));
    ++i;
  }
  EXPECT_EQ(i, 4u);
}

TEST(EmbeddingStoreTest, RandomShapesRoundTrip) {
  ScopedTempDir dir;
  std::mt19937 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 12);
    std::vector<int> frames(1 + rng() % 6);
    for (int& t : frames) t = 1 + static_cast<int>(rng() % 20);
    const Fixture fx = MakeFixture(frames, dim, trial);
    const auto path = dir / "r.embs";
    WriteStore(path, fx.sequences, fx.manifest);
    const Store back = ReadStore(path);
    ASSERT_EQ(back.manifest, fx.manifest);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      ASSERT_TRUE(BitEqual(back.sequences[i].values, fx.sequences[i].values));
    }
  }
}

TEST(MeanPoolTest, Examples) {
  FrameMatrix one(1, 3);
  one << 1.5f, -2.f, 0.25f;
  EXPECT_EQ(MeanPool(one), Eigen::Vector3d(1.5, -2.0, 0.25));
  FrameMatrix two(2, 2);
  two << 1, 3, 3, 1;
  EXPECT_EQ(MeanPool(two), Eigen::Vector2d(2, 2));
  EXPECT_THROW(MeanPool(FrameMatrix(0, 2)), Error);
}

TEST(MeanPoolTest, MatchesDirectColumnMeans) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(-5, 5);
  FrameMatrix m(7, 5);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  const Eigen::VectorXd pooled = MeanPool(m);
  for (int d = 0; d < 5; ++d) {
    double sum = 0.0;
    for (int t = 0; t < 7; ++t) sum += m(t, d);
    EXPECT_EQ(pooled[d], sum / 7);
  }
}

EmbeddingGrid CountingGrid() {
  EmbeddingGrid g;
  g.time_steps = 2;
  g.spec_patches = 3;
  g.dim = 1;
  g.values = {1, 2, 3, 4, 5, 6};
  return g;
}

TEST(GridAggregateTest, Modes) {
  const EmbeddingGrid g = CountingGrid();
  const AggregatedSequence flat = GridAggregate(g, GridMode::kTimeSpec);
  ASSERT_EQ(flat.values.rows(), 6);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(flat.values(i, 0), i + 1);
  EXPECT_TRUE(flat.temporal);

  const AggregatedSequence time = GridAggregate(g, GridMode::kTime);
  ASSERT_EQ(time.values.rows(), 2);
  EXPECT_EQ(time.values(0, 0), 2);
  EXPECT_EQ(time.values(1, 0), 5);

  const AggregatedSequence spec = GridAggregate(g, GridMode::kSpec);
  ASSERT_EQ(spec.values.rows(), 3);
  EXPECT_EQ(spec.values(0, 0), 2.5);
  EXPECT_FALSE(spec.temporal);
}

TEST(GridAggregateTest, SinglePatchTimeEqualsFlattened) {
  EmbeddingGrid g;
  g.time_steps = 4;
  g.spec_patches = 1;
  g.dim = 2;
  g.values = {1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_TRUE(GridAggregate(g, GridMode::kTime).values ==
              GridAggregate(g, GridMode::kTimeSpec).values);
}

TEST(GridAggregateTest, GrandMeanIdentity) {
  std::mt19937 rng(12);
  std::normal_distribution<float> n(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    EmbeddingGrid g;
    g.time_steps = 1 + static_cast<int>(rng() % 8);
    g.spec_patches = 1 + static_cast<int>(rng() % 8);
    g.dim = 1 + static_cast<int>(rng() % 6);
    g.values.resize(static_cast<std::size_t>(g.time_steps) * g.spec_patches * g.dim);
    for (float& v : g.values) v = n(rng);
    const Eigen::VectorXd a = MeanPool(GridAggregate(g, GridMode::kTime).values);
    const Eigen::VectorXd b = MeanPool(GridAggregate(g, GridMode::kTimeSpec).values);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(GridAggregateTest, FlattenedRecordRebuildsGrid) {
  EmbeddingSequence seq;
  seq.segment_id = 4;
  seq.values.resize(6, 1);
  seq.values << 1, 2, 3, 4, 5, 6;
  const EmbeddingGrid g = GridFromFlattened(seq, 3);
  EXPECT_EQ(g.time_steps, 2);
  EXPECT_EQ(g.at(1, 0, 0), 4);
  EXPECT_THROW(GridFromFlattened(seq, 4), Error);
  EXPECT_EQ(ParseGridMode("time+spec"), GridMode::kTimeSpec);
  EXPECT_THROW(ParseGridMode("freq"), Error);
}

}  // namespace
}  // namespace callprobe::store
