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

#include "callprobe/dataset/fold_plan.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "callprobe/common/error.h"

namespace callprobe::dataset {
namespace {

struct Recording {
  std::string id;
  std::vector<std::uint64_t> segments;
  std::map<int, int> class_counts;
};

}  // namespace

FoldPlan::FoldPlan(int k, std::map<std::uint64_t, int> assignment,
                   std::uint64_t seed)
    : k_(k), seed_(seed), assignment_(std::move(assignment)) {
  if (k_ < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "nested cross-validation needs k >= 3, got " +
                    std::to_string(k_));
  }
  for (const auto& [id, fold] : assignment_) {
    if (fold < 0 || fold >= k_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "segment " + std::to_string(id) + " has fold " +
                      std::to_string(fold) + " outside [0, k)");
    }
  }
  for (int test = 0; test < k_; ++test) {
    OuterTurn outer;
    outer.test_fold = test;
    for (int f = 0; f < k_; ++f) {
      if (f != test) outer.non_test_folds.push_back(f);
    }
    for (int dev : outer.non_test_folds) {
      InnerTurn inner;
      inner.dev_fold = dev;
      for (int f : outer.non_test_folds) {
        if (f != dev) inner.train_folds.push_back(f);
      }
      outer.inner_turns.push_back(std::move(inner));
    }
    outer_turns_.push_back(std::move(outer));
  }
}

int FoldPlan::FoldOf(std::uint64_t segment_id) const {
  const auto it = assignment_.find(segment_id);
  if (it == assignment_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment " + std::to_string(segment_id) + " not in fold plan");
  }
  return it->second;
}

std::vector<std::uint64_t> FoldPlan::SegmentsIn(std::span<const int> folds) const {
  std::vector<std::uint64_t> ids;
  for (const auto& [id, fold] : assignment_) {
    if (std::find(folds.begin(), folds.end(), fold) != folds.end()) {
      ids.push_back(id);
    }
  }
  return ids;
}

void FoldPlan::Write(std::ostream& out) const {
  nlohmann::json j;
  j["version"] = 1;
  j["k"] = k_;
  j["seed"] = seed_;
  nlohmann::json assignment = nlohmann::json::array();
  for (const auto& [id, fold] : assignment_) {
    assignment.push_back({{"segment_id", id}, {"fold", fold}});
  }
  j["assignment"] = std::move(assignment);
  nlohmann::json turns = nlohmann::json::array();
  for (const OuterTurn& outer : outer_turns_) {
    nlohmann::json inner = nlohmann::json::array();
    for (const InnerTurn& t : outer.inner_turns) {
      inner.push_back({{"dev", t.dev_fold}, {"train", t.train_folds}});
    }
    turns.push_back({{"test", outer.test_fold}, {"inner", std::move(inner)}});
  }
  j["outer_turns"] = std::move(turns);
  out << j.dump(2) << "\n";
}

void FoldPlan::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  Write(out);
}

FoldPlan FoldPlan::Read(std::istream& in) {
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    std::map<std::uint64_t, int> assignment;
    for (const auto& entry : j.at("assignment")) {
      const auto id = entry.at("segment_id").get<std::uint64_t>();
      if (!assignment.emplace(id, entry.at("fold").get<int>()).second) {
        throw Error(ErrorCode::kParseError,
                    "duplicate segment " + std::to_string(id));
      }
    }
    return FoldPlan(j.at("k").get<int>(), std::move(assignment),
                    j.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("fold plan: ") + e.what());
  }
}

FoldPlan FoldPlan::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return Read(in);
}

FoldPlan MakeFoldPlan(std::span<const Segment> segments, int k,
                      std::uint64_t seed) {
  if (k < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "nested cross-validation needs k >= 3, got " +
                    std::to_string(k));
  }
  std::map<std::string, Recording> grouped;
  int num_classes = 0;
  for (const Segment& s : segments) {
    Recording& r = grouped[s.recording_id];
    r.id = s.recording_id;
    r.segments.push_back(s.segment_id);
    ++r.class_counts[s.primary_label];
    num_classes = std::max(num_classes, s.primary_label + 1);
  }
  if (static_cast<int>(grouped.size()) < k) {
    throw Error(ErrorCode::kTooFewRecordings,
                std::to_string(grouped.size()) + " recordings for " +
                    std::to_string(k) + " folds");
  }

  std::vector<Recording> recordings;
  recordings.reserve(grouped.size());
  for (auto& [id, r] : grouped) recordings.push_back(std::move(r));
  std::mt19937_64 rng(seed);
  std::shuffle(recordings.begin(), recordings.end(), rng);
  std::stable_sort(recordings.begin(), recordings.end(),
                   [](const Recording& a, const Recording& b) {
                     return a.segments.size() > b.segments.size();
                   });

  // Placing x_c more class-c segments into a fold already holding n_c raises
  // the sum of squared counts by 2 n_c x_c + x_c^2; the fold mean is the same
  // whichever fold is chosen, so this is the variance increase up to a
  // constant. Fold size only breaks ties.
  std::vector<std::vector<long>> counts(k, std::vector<long>(num_classes, 0));
  std::vector<long> sizes(k, 0);
  std::map<std::uint64_t, int> assignment;
  for (const Recording& r : recordings) {
    const long total = static_cast<long>(r.segments.size());
    int best = -1;
    long best_cost = 0;
    for (int f = 0; f < k; ++f) {
      long cost = 0;
      for (const auto& [c, x] : r.class_counts) {
        cost += 2 * counts[f][c] * x + static_cast<long>(x) * x;
      }
      if (best < 0 || cost < best_cost ||
          (cost == best_cost && sizes[f] < sizes[best])) {
        best = f;
        best_cost = cost;
      }
    }
    sizes[best] += total;
    for (const auto& [c, x] : r.class_counts) counts[best][c] += x;
    for (std::uint64_t id : r.segments) assignment[id] = best;
  }
  return FoldPlan(k, std::move(assignment), seed);
}

void ApplyFolds(const FoldPlan& plan, std::span<Segment> segments) {
  for (Segment& s : segments) s.fold = plan.FoldOf(s.segment_id);
}

}  // namespace callprobe::dataset
