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

#ifndef CALLPROBE_DATASET_SEGMENT_H_
#define CALLPROBE_DATASET_SEGMENT_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "callprobe/dataset/annotation.h"

namespace callprobe::dataset {

struct SegmentBounds {
  double start = 0.0;
  double end = 0.0;
};

struct Segment {
  std::uint64_t segment_id = 0;
  std::string recording_id;
  double start = 0.0;
  double end = 0.0;
  int primary_label = 0;
  // Sorted, unique; always contains primary_label.
  std::vector<int> overlapping_labels;
  int fold = 0;
  // Set when no annotation covered the segment centre.
  bool centre_fallback = false;
};

// Widens the annotated call by `collar` on both sides, clamped to
// [0, recording_len].
SegmentBounds SegmentFromAnnotation(const Annotation& a, double collar,
                                    double recording_len);

struct LabelAssignment {
  int label = 0;
  bool centre_fallback = false;
};

// The call covering the segment midpoint wins; among several, the one with
// the longest overlap, then the lowest class index. With no call at the
// midpoint the longest-overlapping call is used and the fallback flag set.
// Throws kNoOverlappingCall when nothing overlaps the segment.
LabelAssignment AssignPrimaryLabel(const SegmentBounds& bounds,
                                   std::span<const Annotation> annotations);

// Class indices of every annotation with a positive-length overlap.
std::vector<int> OverlappingLabels(const SegmentBounds& bounds,
                                   std::span<const Annotation> annotations);

// True when `predicted` matches any annotated call inside the segment.
bool IsCorrect(int predicted, const Segment& segment);

// One segment per annotation, ids assigned in annotation order. Recordings
// missing from `recording_lengths` are not clamped at the end.
std::vector<Segment> BuildSegments(
    const AnnotationTable& table, double collar,
    const std::map<std::string, double>& recording_lengths);

}  // namespace callprobe::dataset

#endif  // CALLPROBE_DATASET_SEGMENT_H_
