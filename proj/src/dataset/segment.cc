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

#include "callprobe/dataset/segment.h"

#include <algorithm>
#include <limits>

#include "callprobe/common/error.h"

namespace callprobe::dataset {
namespace {

double Overlap(const SegmentBounds& b, const Annotation& a) {
  return std::max(0.0, std::min(b.end, a.end) - std::max(b.start, a.start));
}

// Longest overlap first, then lowest class index.
bool Better(double overlap, int label, double best_overlap, int best_label) {
  if (overlap != best_overlap) return overlap > best_overlap;
  return label < best_label;
}

}  // namespace

SegmentBounds SegmentFromAnnotation(const Annotation& a, double collar,
                                    double recording_len) {
  if (collar < 0) {
    throw Error(ErrorCode::kInvalidArgument, "collar must be non-negative");
  }
  return {std::max(0.0, a.start - collar),
          std::min(recording_len, a.end + collar)};
}

LabelAssignment AssignPrimaryLabel(const SegmentBounds& bounds,
                                   std::span<const Annotation> annotations) {
  const double centre = 0.5 * (bounds.start + bounds.end);
  int centre_label = -1;
  double centre_overlap = -1.0;
  int any_label = -1;
  double any_overlap = 0.0;
  for (const Annotation& a : annotations) {
    const double overlap = Overlap(bounds, a);
    if (overlap <= 0.0) continue;
    if (any_label < 0 || Better(overlap, a.call_type, any_overlap, any_label)) {
      any_label = a.call_type;
      any_overlap = overlap;
    }
    if (a.start <= centre && centre <= a.end &&
        (centre_label < 0 ||
         Better(overlap, a.call_type, centre_overlap, centre_label))) {
      centre_label = a.call_type;
      centre_overlap = overlap;
    }
  }
  if (centre_label >= 0) return {centre_label, false};
  if (any_label >= 0) return {any_label, true};
  throw Error(ErrorCode::kNoOverlappingCall,
              "no annotation overlaps [" + std::to_string(bounds.start) + ", " +
                  std::to_string(bounds.end) + "]");
}

std::vector<int> OverlappingLabels(const SegmentBounds& bounds,
                                   std::span<const Annotation> annotations) {
  std::vector<int> labels;
  for (const Annotation& a : annotations) {
    if (Overlap(bounds, a) > 0.0) labels.push_back(a.call_type);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

bool IsCorrect(int predicted, const Segment& segment) {
  return std::find(segment.overlapping_labels.begin(),
                   segment.overlapping_labels.end(),
                   predicted) != segment.overlapping_labels.end();
}

std::vector<Segment> BuildSegments(
    const AnnotationTable& table, double collar,
    const std::map<std::string, double>& recording_lengths) {
  std::map<std::string, std::vector<Annotation>> by_recording;
  for (const Annotation& a : table.annotations) {
    by_recording[a.recording_id].push_back(a);
  }

  std::vector<Segment> segments;
  segments.reserve(table.annotations.size());
  for (const Annotation& a : table.annotations) {
    const auto len_it = recording_lengths.find(a.recording_id);
    const double len = len_it != recording_lengths.end()
                           ? len_it->second
                           : std::numeric_limits<double>::infinity();
    const SegmentBounds bounds = SegmentFromAnnotation(a, collar, len);
    const auto& siblings = by_recording.at(a.recording_id);

    Segment s;
    s.segment_id = segments.size();
    s.recording_id = a.recording_id;
    s.start = bounds.start;
    s.end = bounds.end;
    const LabelAssignment label = AssignPrimaryLabel(bounds, siblings);
    s.primary_label = label.label;
    s.centre_fallback = label.centre_fallback;
    s.overlapping_labels = OverlappingLabels(bounds, siblings);
    segments.push_back(std::move(s));
  }
  return segments;
}

}  // namespace callprobe::dataset
