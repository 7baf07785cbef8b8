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

#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "callprobe/common/error.h"
#include "callprobe/dataset/annotation.h"
#include "callprobe/dataset/fold_plan.h"
#include "callprobe/dataset/segment.h"

namespace callprobe::dataset {
namespace {

TEST(SegmentFromAnnotationTest, AddsCollar) {
  const SegmentBounds b = SegmentFromAnnotation({"r", 0, 10.0, 12.0}, 0.25, 100);
  EXPECT_DOUBLE_EQ(b.start, 9.75);
  EXPECT_DOUBLE_EQ(b.end, 12.25);
}

TEST(SegmentFromAnnotationTest, ClampsToRecording) {
  SegmentBounds b = SegmentFromAnnotation({"r", 0, 0.1, 1.0}, 0.25, 100);
  EXPECT_DOUBLE_EQ(b.start, 0.0);
  EXPECT_DOUBLE_EQ(b.end, 1.25);
  b = SegmentFromAnnotation({"r", 0, 98.0, 99.9}, 0.25, 100);
  EXPECT_DOUBLE_EQ(b.end, 100.0);
}

TEST(SegmentFromAnnotationTest, ZeroCollarIsIdentity) {
  const SegmentBounds b = SegmentFromAnnotation({"r", 0, 3.5, 4.75}, 0.0, 100);
  EXPECT_DOUBLE_EQ(b.start, 3.5);
  EXPECT_DOUBLE_EQ(b.end, 4.75);
}

TEST(SegmentFromAnnotationTest, NegativeCollarRejected) {
  EXPECT_THROW(SegmentFromAnnotation({"r", 0, 1, 2}, -0.1, 10), Error);
}

TEST(AssignPrimaryLabelTest, UniqueCentreCover) {
  const std::vector<Annotation> anns = {{"r", 3, 10.0, 12.0}};
  const LabelAssignment a = AssignPrimaryLabel({9.75, 12.25}, anns);
  EXPECT_EQ(a.label, 3);
  EXPECT_FALSE(a.centre_fallback);
}

TEST(AssignPrimaryLabelTest, LongestOverlapWinsAmongCentreCovers) {
  // Segment [10, 12], centre 11. Class 7 covers [10.5, 12.0] -> 1.5 s,
  // class 1 covers [10.8, 11.2] -> 0.4 s. Both cover the centre.
  const std::vector<Annotation> anns = {{"r", 1, 10.8, 11.2},
                                        {"r", 7, 10.5, 12.0}};
  EXPECT_EQ(AssignPrimaryLabel({10.0, 12.0}, anns).label, 7);
}

TEST(AssignPrimaryLabelTest, EqualOverlapFallsToLowestClass) {
  const std::vector<Annotation> anns = {{"r", 5, 10.0, 12.0},
                                        {"r", 2, 10.0, 12.0}};
  EXPECT_EQ(AssignPrimaryLabel({10.0, 12.0}, anns).label, 2);
}

TEST(AssignPrimaryLabelTest, FallbackWhenNothingCoversCentre) {
  const std::vector<Annotation> anns = {{"r", 4, 10.0, 10.5},
                                        {"r", 6, 11.6, 11.8}};
  const LabelAssignment a = AssignPrimaryLabel({10.0, 12.0}, anns);
  EXPECT_EQ(a.label, 4);
  EXPECT_TRUE(a.centre_fallback);
}

TEST(AssignPrimaryLabelTest, NoOverlapThrows) {
  const std::vector<Annotation> anns = {{"r", 4, 20.0, 21.0}};
  try {
    AssignPrimaryLabel({10.0, 12.0}, anns);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoOverlappingCall);
  }
}

TEST(IsCorrectTest, AnyOverlappingLabelCounts) {
  Segment s;
  s.overlapping_labels = {5};
  EXPECT_TRUE(IsCorrect(5, s));
  s.overlapping_labels = {2, 5};
  EXPECT_TRUE(IsCorrect(2, s));
  EXPECT_FALSE(IsCorrect(7, s));
}

TEST(IsCorrectTest, MonotoneInLabelSet) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Segment s;
    for (int c = 0; c < 10; ++c) {
      if (rng() % 3 == 0) s.overlapping_labels.push_back(c);
    }
    const int predicted = static_cast<int>(rng() % 10);
    const bool before = IsCorrect(predicted, s);
    s.overlapping_labels.push_back(static_cast<int>(rng() % 10));
    std::sort(s.overlapping_labels.begin(), s.overlapping_labels.end());
    if (before) EXPECT_TRUE(IsCorrect(predicted, s));
  }
}

TEST(ReadAnnotationsTest, SortsClassNamesAndSkipsComments) {
  std::istringstream in(
      "# recording\tstart\tend\tclass\n"
      "rec1\t10.0\t12.0\trumble\n"
      "rec1\t11.0\t11.5\ttrumpet\r\n"
      "\n"
      "rec2\t0.5\t1.0\tbark\n");
  const AnnotationTable t = ReadAnnotations(in);
  ASSERT_EQ(t.class_names, (std::vector<std::string>{"bark", "rumble", "trumpet"}));
  ASSERT_EQ(t.annotations.size(), 3u);
  EXPECT_EQ(t.annotations[0].call_type, 1);
  EXPECT_EQ(t.annotations[1].call_type, 2);
  EXPECT_EQ(t.annotations[2].call_type, 0);
  EXPECT_DOUBLE_EQ(t.annotations[1].start, 11.0);
}

TEST(ReadAnnotationsTest, RejectsMalformedLines) {
  std::istringstream bad_fields("rec1\t1.0\t2.0\n");
  EXPECT_THROW(ReadAnnotations(bad_fields), Error);
  std::istringstream bad_time("rec1\tx\t2.0\trumble\n");
  EXPECT_THROW(ReadAnnotations(bad_time), Error);
  std::istringstream reversed("rec1\t3.0\t2.0\trumble\n");
  EXPECT_THROW(ReadAnnotations(reversed), Error);
}

TEST(BuildSegmentsTest, OverlapsAndPrimaryLabels) {
  std::istringstream in(
      "rec1\t10.0\t12.0\trumble\n"
      "rec1\t11.9\t13.0\ttrumpet\n"
      "rec2\t0.1\t1.0\trumble\n");
  const AnnotationTable t = ReadAnnotations(in);
  const auto segs = BuildSegments(t, 0.25, {{"rec2", 1.1}});
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].primary_label, 0);
  EXPECT_EQ(segs[0].overlapping_labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(segs[1].primary_label, 1);
  EXPECT_EQ(segs[1].overlapping_labels, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(segs[2].start, 0.0);
  EXPECT_DOUBLE_EQ(segs[2].end, 1.1);
  for (const Segment& s : segs) {
    EXPECT_TRUE(IsCorrect(s.primary_label, s));
    EXPECT_LT(s.start, s.end);
  }
}

std::vector<Segment> RandomSegments(int recordings, int classes, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<Segment> out;
  for (int r = 0; r < recordings; ++r) {
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      Segment s;
      s.segment_id = out.size();
      s.recording_id = "rec" + std::to_string(r);
      s.primary_label = static_cast<int>(rng() % classes);
      s.overlapping_labels = {s.primary_label};
      out.push_back(s);
    }
  }
  return out;
}

void CheckPlanInvariants(const FoldPlan& plan, const std::vector<Segment>& segs) {
  const int k = plan.k();
  ASSERT_EQ(plan.assignment().size(), segs.size());
  std::map<std::string, int> recording_fold;
  std::vector<int> fold_sizes(k, 0);
  for (const Segment& s : segs) {
    const int f = plan.FoldOf(s.segment_id);
    ++fold_sizes[f];
    auto [it, inserted] = recording_fold.emplace(s.recording_id, f);
    EXPECT_EQ(it->second, f) << "recording " << s.recording_id << " leaks";
  }
  for (int f = 0; f < k; ++f) EXPECT_GT(fold_sizes[f], 0);

  ASSERT_EQ(static_cast<int>(plan.outer_turns().size()), k);
  for (const OuterTurn& outer : plan.outer_turns()) {
    ASSERT_EQ(static_cast<int>(outer.inner_turns.size()), k - 1);
    for (const InnerTurn& inner : outer.inner_turns) {
      std::multiset<int> all(inner.train_folds.begin(), inner.train_folds.end());
      all.insert(inner.dev_fold);
      all.insert(outer.test_fold);
      std::multiset<int> expected;
      for (int f = 0; f < k; ++f) expected.insert(f);
      EXPECT_EQ(all, expected);
      EXPECT_NE(inner.dev_fold, outer.test_fold);
    }
  }
}

TEST(FoldPlanTest, StructureForFiveAndTenFolds) {
  const auto segs = RandomSegments(60, 6, 1);
  for (int k : {5, 10}) {
    const FoldPlan plan = MakeFoldPlan(segs, k, 42);
    CheckPlanInvariants(plan, segs);
    for (const OuterTurn& o : plan.outer_turns()) {
      EXPECT_EQ(static_cast<int>(o.inner_turns.size()), k - 1);
      EXPECT_EQ(static_cast<int>(o.non_test_folds.size()), k - 1);
    }
  }
}

TEST(FoldPlanTest, InvariantsOverRandomDatasets) {
  for (unsigned seed = 0; seed < 30; ++seed) {
    const int k = 3 + static_cast<int>(seed % 8);
    const auto segs = RandomSegments(k + static_cast<int>(seed * 3), 5, seed);
    CheckPlanInvariants(MakeFoldPlan(segs, k, seed), segs);
  }
}

TEST(FoldPlanTest, DeterministicGivenSeed) {
  const auto segs = RandomSegments(40, 4, 9);
  EXPECT_EQ(MakeFoldPlan(segs, 5, 7), MakeFoldPlan(segs, 5, 7));
}

TEST(FoldPlanTest, BalancesClassCounts) {
  // Single-segment recordings: greedy placement keeps every class within one
  // segment of even across folds.
  std::vector<Segment> segs;
  for (int i = 0; i < 100; ++i) {
    Segment s;
    s.segment_id = i;
    s.recording_id = "r" + std::to_string(i);
    s.primary_label = i % 4;
    segs.push_back(s);
  }
  const FoldPlan plan = MakeFoldPlan(segs, 5, 3);
  std::vector<std::vector<int>> counts(5, std::vector<int>(4, 0));
  for (const Segment& s : segs) ++counts[plan.FoldOf(s.segment_id)][s.primary_label];
  for (int c = 0; c < 4; ++c) {
    for (int f = 0; f < 5; ++f) EXPECT_EQ(counts[f][c], 5);
  }
}

TEST(FoldPlanTest, TooFewRecordings) {
  const auto segs = RandomSegments(4, 3, 2);
  try {
    MakeFoldPlan(segs, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewRecordings);
  }
  EXPECT_THROW(MakeFoldPlan(segs, 2, 1), Error);
}

TEST(FoldPlanTest, JsonRoundTrip) {
  const auto segs = RandomSegments(30, 4, 5);
  const FoldPlan plan = MakeFoldPlan(segs, 5, 11);
  std::stringstream buf;
  plan.Write(buf);
  const FoldPlan back = FoldPlan::Read(buf);
  EXPECT_EQ(back, plan);
  EXPECT_EQ(back.seed(), 11u);
  EXPECT_EQ(back.outer_turns().size(), 5u);
}

TEST(FoldPlanTest, ApplyFoldsAndSegmentsIn) {
  auto segs = RandomSegments(20, 3, 8);
  const FoldPlan plan = MakeFoldPlan(segs, 4, 2);
  ApplyFolds(plan, segs);
  const std::vector<int> folds = {1, 3};
  const auto ids = plan.SegmentsIn(folds);
  std::size_t expected = 0;
  for (const Segment& s : segs) {
    if (s.fold == 1 || s.fold == 3) ++expected;
  }
  EXPECT_EQ(ids.size(), expected);
}

}  // namespace
}  // namespace callprobe::dataset
