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

#ifndef CALLPROBE_TESTS_ORACLES_METRIC_ORACLE_H_
#define CALLPROBE_TESTS_ORACLES_METRIC_ORACLE_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace callprobe::oracle {

// Direct pair enumeration: 1 per correctly ordered positive/negative pair,
// 0.5 per tie.
inline double PairwiseAuc(const std::vector<double>& s,
                          const std::vector<std::uint8_t>& pos) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!pos[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (pos[j]) continue;
      pairs += 1.0;
      if (s[i] > s[j]) {
        wins += 1.0;
      } else if (s[i] == s[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

// Enumerates the prefix {score >= t} for every distinct t from high to low
// by rescanning all items.
inline double PrefixAp(const std::vector<double>& s,
                       const std::vector<std::uint8_t>& pos) {
  const std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  const int total = static_cast<int>(std::count(pos.begin(), pos.end(), 1));
  double ap = 0.0;
  int prev_tp = 0;
  for (double t : thresholds) {
    int tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (pos[i] ? tp : fp)++;
    }
    if (tp > prev_tp) {
      ap += (static_cast<double>(tp - prev_tp) / total) *
            (static_cast<double>(tp) / (tp + fp));
    }
    prev_tp = tp;
  }
  return ap;
}

}  // namespace callprobe::oracle

#endif  // CALLPROBE_TESTS_ORACLES_METRIC_ORACLE_H_
