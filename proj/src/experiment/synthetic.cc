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

#include "callprobe/experiment/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "callprobe/common/error.h"
#include "callprobe/common/parallel.h"
#include "callprobe/dataset/segment.h"

namespace callprobe::experiment {
namespace {

Eigen::MatrixXd ClassMeans(const SyntheticOptions& o, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd dirs(o.num_classes, o.dim);
  for (Eigen::Index i = 0; i < dirs.size(); ++i) dirs.data()[i] = n(rng);
  if (o.num_classes <= o.dim) {
    // Gram-Schmidt on the rows.
    for (int c = 0; c < o.num_classes; ++c) {
      for (int p = 0; p < c; ++p) {
        dirs.row(c) -= dirs.row(c).dot(dirs.row(p)) * dirs.row(p);
      }
      dirs.row(c).normalize();
    }
  } else {
    dirs.rowwise().normalize();
  }
  return dirs * (o.separation / std::sqrt(2.0));
}

void Validate(const SyntheticOptions& o) {
  if (o.num_classes < 2 || o.per_class < 1 || o.dim < 1 || o.min_frames < 1 ||
      o.max_frames < o.min_frames || !(o.separation >= 0.0) || o.folds < 3 ||
      o.segments_per_recording < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic options out of range");
  }
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticOptions& o,
                                std::uint64_t value_stream) {
  Validate(o);
  std::mt19937_64 structure(DeriveSeed(o.seed, {0}));
  std::mt19937_64 mean_rng(DeriveSeed(o.seed, {1}));
  std::mt19937_64 noise_rng(DeriveSeed(o.seed, {2, value_stream}));

  const int n = o.num_classes * o.per_class;
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % o.num_classes;
  std::shuffle(labels.begin(), labels.end(), structure);
  std::uniform_int_distribution<int> frames(o.min_frames, o.max_frames);
  std::vector<int> lengths(n);
  for (int& t : lengths) t = frames(structure);

  std::vector<dataset::Segment> segments;
  store::StoreManifest manifest;
  manifest.dim = static_cast<std::uint32_t>(o.dim);
  manifest.layer_tag = o.layer_tag;
  for (int c = 0; c < o.num_classes; ++c) {
    manifest.classes.push_back("class" + std::to_string(c));
  }
  for (int i = 0; i < n; ++i) {
    dataset::Segment s;
    s.segment_id = static_cast<std::uint64_t>(i + 1);
    s.recording_id = "synth" + std::to_string(i / o.segments_per_recording);
    s.start = 2.0 * (i % o.segments_per_recording);
    s.end = s.start + 1.0;
    s.primary_label = labels[i];
    s.overlapping_labels = {labels[i]};
    segments.push_back(std::move(s));
  }
  dataset::FoldPlan plan = dataset::MakeFoldPlan(segments, o.folds, o.seed);

  const Eigen::MatrixXd means = ClassMeans(o, mean_rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<store::EmbeddingSequence> sequences;
  for (int i = 0; i < n; ++i) {
    store::EmbeddingSequence seq;
    seq.segment_id = segments[i].segment_id;
    seq.values.resize(lengths[i], o.dim);
    for (int t = 0; t < lengths[i]; ++t) {
      for (int d = 0; d < o.dim; ++d) {
        seq.values(t, d) = static_cast<float>(means(labels[i], d) + noise(noise_rng));
      }
    }
    store::SegmentEntry e;
    e.segment_id = seq.segment_id;
    e.label = labels[i];
    e.fold = plan.FoldOf(seq.segment_id);
    e.recording_id = segments[i].recording_id;
    e.start = segments[i].start;
    e.end = segments[i].end;
    e.frames = static_cast<std::uint32_t>(lengths[i]);
    e.overlapping_labels = {labels[i]};
    manifest.segments.push_back(std::move(e));
    sequences.push_back(std::move(seq));
  }
  return {std::move(manifest), std::move(sequences), std::move(plan)};
}

void WriteSynthetic(const std::filesystem::path& dir, const std::string& stem,
                    const SyntheticData& data) {
  std::filesystem::create_directories(dir);
  store::WriteStore(dir / (stem + ".embs"), data.sequences, data.manifest);
  data.plan.Save(dir / "folds.json");
}

std::vector<std::string> WriteLayerStack(const std::filesystem::path& dir,
                                         const SyntheticOptions& options,
                                         int num_layers, int separable_layer) {
  if (num_layers < 1 || separable_layer < 0 || separable_layer > num_layers) {
    throw Error(ErrorCode::kInvalidArgument, "separable layer out of range");
  }
  std::vector<std::string> tags;
  for (int layer = 0; layer <= num_layers; ++layer) {
    char tag[16];
    if (layer == 0) {
      std::snprintf(tag, sizeof tag, "feat");
    } else {
      std::snprintf(tag, sizeof tag, "layer%02d", layer);
    }
    SyntheticOptions o = options;
    o.layer_tag = tag;
    o.separation = layer == separable_layer ? options.separation : 0.0;
    WriteSynthetic(dir, tag, GenerateSynthetic(o, static_cast<std::uint64_t>(layer)));
    tags.emplace_back(tag);
  }
  return tags;
}

}  // namespace callprobe::experiment
