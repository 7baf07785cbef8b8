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

#include "callprobe/experiment/baseline_store.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "callprobe/common/error.h"
#include "callprobe/dataset/annotation.h"
#include "callprobe/dataset/fold_plan.h"
#include "callprobe/dataset/segment.h"
#include "callprobe/dsp/features.h"
#include "callprobe/dsp/wav.h"
#include "callprobe/store/embedding_store.h"

namespace callprobe::experiment {
namespace {

std::map<std::string, double> RecordingLengths(
    const dataset::AnnotationTable& table, const std::filesystem::path& dir) {
  std::map<std::string, double> lengths;
  if (dir.empty()) return lengths;
  for (const dataset::Annotation& a : table.annotations) {
    if (lengths.contains(a.recording_id)) continue;
    lengths[a.recording_id] =
        dsp::ReadWav(dir / (a.recording_id + ".wav")).duration_seconds();
  }
  return lengths;
}

}  // namespace

BaselineSummary BuildBaselineStore(const BaselineOptions& o) {
  const dataset::AnnotationTable table = dataset::ReadAnnotations(o.annotations);
  std::map<std::string, dsp::Waveform> audio;
  std::map<std::string, double> lengths;
  for (const dataset::Annotation& a : table.annotations) {
    if (audio.contains(a.recording_id)) continue;
    dsp::Waveform w = dsp::ReadWav(o.audio_dir / (a.recording_id + ".wav"));
    lengths[a.recording_id] = w.duration_seconds();
    audio.emplace(a.recording_id, std::move(w));
  }
  std::vector<dataset::Segment> segments =
      dataset::BuildSegments(table, o.collar, lengths);
  std::optional<dataset::FoldPlan> plan;
  if (o.fold_plan) plan = dataset::FoldPlan::Load(*o.fold_plan);

  dsp::SpectralConfig cfg = o.kind == BaselineKind::kMfcc
                                ? dsp::SpectralConfig::Mfcc()
                                : dsp::SpectralConfig::Beans(o.beans_ceps);
  if (o.n_fft) cfg.n_fft = *o.n_fft;
  const int dim = o.kind == BaselineKind::kMfcc ? cfg.n_ceps : 4 * cfg.n_ceps;

  store::StoreManifest manifest;
  manifest.dim = static_cast<std::uint32_t>(dim);
  manifest.layer_tag = o.kind == BaselineKind::kMfcc ? "mfcc" : "beans";
  manifest.temporal = o.kind == BaselineKind::kMfcc;
  manifest.classes = table.class_names;

  BaselineSummary summary;
  store::StoreWriter writer(o.out, manifest.dim);
  for (const dataset::Segment& s : segments) {
    const dsp::Waveform& w = audio.at(s.recording_id);
    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(s.start * w.sample_rate)));
    const auto last = std::min(w.samples.size(),
                               static_cast<std::size_t>(std::ceil(s.end * w.sample_rate)));
    dsp::Waveform cut;
    cut.sample_rate = w.sample_rate;
    if (last > first) cut.samples.assign(w.samples.begin() + first, w.samples.begin() + last);

    store::EmbeddingSequence seq;
    seq.segment_id = s.segment_id;
    try {
      const dsp::FeatureSequence feats = dsp::MfccSequence(cut, cfg);
      if (o.kind == BaselineKind::kMfcc) {
        seq.values = feats.frames.cast<float>();
      } else {
        seq.values = dsp::BeansEmbedding(feats).transpose().cast<float>();
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSignalTooShort) throw;
      summary.skipped.push_back("segment " + std::to_string(s.segment_id) +
                                " (" + s.recording_id + "): " + e.what());
      continue;
    }
    writer.Append(seq);

    store::SegmentEntry entry;
    entry.segment_id = s.segment_id;
    entry.label = s.primary_label;
    entry.fold = plan ? plan->FoldOf(s.segment_id) : s.fold;
    entry.recording_id = s.recording_id;
    entry.start = s.start;
    entry.end = s.end;
    entry.frames = static_cast<std::uint32_t>(seq.values.rows());
    entry.overlapping_labels = s.overlapping_labels;
    manifest.segments.push_back(std::move(entry));
    ++summary.written;
  }
  writer.Finish(manifest);
  return summary;
}

void BuildFoldPlanFile(const std::filesystem::path& annotations,
                       const std::filesystem::path& audio_dir, double collar,
                       int k, std::uint64_t seed,
                       const std::filesystem::path& out) {
  const dataset::AnnotationTable table = dataset::ReadAnnotations(annotations);
  const std::vector<dataset::Segment> segments =
      dataset::BuildSegments(table, collar, RecordingLengths(table, audio_dir));
  dataset::MakeFoldPlan(segments, k, seed).Save(out);
}

}  // namespace callprobe::experiment
