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

#ifndef CALLPROBE_DATASET_FOLD_PLAN_H_
#define CALLPROBE_DATASET_FOLD_PLAN_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "callprobe/dataset/segment.h"

namespace callprobe::dataset {

struct InnerTurn {
  int dev_fold = 0;
  std::vector<int> train_folds;
};

struct OuterTurn {
  int test_fold = 0;
  // K-1 turns, one per remaining fold serving as development set.
  std::vector<InnerTurn> inner_turns;
  // Every fold except the test fold, ascending.
  std::vector<int> non_test_folds;
};

// Nested K-fold layout. Immutable once built.
class FoldPlan {
 public:
  // Builds the rotation structure for an explicit assignment.
  FoldPlan(int k, std::map<std::uint64_t, int> assignment, std::uint64_t seed);

  int k() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::uint64_t, int>& assignment() const { return assignment_; }
  const std::vector<OuterTurn>& outer_turns() const { return outer_turns_; }

  // Throws kInvalidArgument for an unknown segment.
  int FoldOf(std::uint64_t segment_id) const;

  // Segment ids whose fold is in `folds`, ascending.
  std::vector<std::uint64_t> SegmentsIn(std::span<const int> folds) const;

  void Write(std::ostream& out) const;
  void Save(const std::filesystem::path& path) const;
  static FoldPlan Read(std::istream& in);
  static FoldPlan Load(const std::filesystem::path& path);

  friend bool operator==(const FoldPlan& a, const FoldPlan& b) {
    return a.k_ == b.k_ && a.assignment_ == b.assignment_;
  }

 private:
  int k_;
  std::uint64_t seed_;
  std::map<std::uint64_t, int> assignment_;
  std::vector<OuterTurn> outer_turns_;
};

// Assigns whole recordings to folds, greedily keeping per-class counts even.
// Recordings are visited largest first after a seeded shuffle, so equal seeds
// give equal plans. Throws kInvalidArgument for k < 3 and kTooFewRecordings
// when there are fewer recordings than folds.
FoldPlan MakeFoldPlan(std::span<const Segment> segments, int k,
                      std::uint64_t seed);

// Copies the plan's fold ids into the segments.
void ApplyFolds(const FoldPlan& plan, std::span<Segment> segments);

}  // namespace callprobe::dataset

#endif  // CALLPROBE_DATASET_FOLD_PLAN_H_
