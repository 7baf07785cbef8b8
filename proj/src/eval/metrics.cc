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

#include "callprobe/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "callprobe/common/error.h"

namespace callprobe::eval {
namespace {

struct Block {
  double score;
  int pos;
  int neg;
};

// Groups equal scores, highest score first.
std::vector<Block> DescendingBlocks(std::span<const double> scores,
                                    Positives positives) {
  if (scores.size() != positives.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kNonFiniteValue, "non-finite score");
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<Block> blocks;
  for (std::size_t i : order) {
    if (blocks.empty() || blocks.back().score != scores[i]) {
      blocks.push_back({scores[i], 0, 0});
    }
    (positives[i] ? blocks.back().pos : blocks.back().neg)++;
  }
  return blocks;
}

void Totals(const std::vector<Block>& blocks, int* pos, int* neg) {
  *pos = 0;
  *neg = 0;
  for (const Block& b : blocks) {
    *pos += b.pos;
    *neg += b.neg;
  }
}

}  // namespace

double RocAuc(std::span<const double> scores, Positives positives) {
  const std::vector<Block> blocks = DescendingBlocks(scores, positives);
  int pos, neg;
  Totals(blocks, &pos, &neg);
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kDegenerateClass,
                "AUC needs positives and negatives (got " + std::to_string(pos) +
                    " and " + std::to_string(neg) + ")");
  }
  // Walk from the lowest score up, counting negatives already passed.
  double wins = 0.0;
  double neg_below = 0.0;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    wins += it->pos * (neg_below + 0.5 * it->neg);
    neg_below += it->neg;
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

double AveragePrecision(std::span<const double> scores, Positives positives) {
  const std::vector<Block> blocks = DescendingBlocks(scores, positives);
  int pos, neg;
  Totals(blocks, &pos, &neg);
  if (pos == 0) {
    throw Error(ErrorCode::kDegenerateClass, "AP needs at least one positive");
  }
  // Extended precision so that rational results such as 5/6 round to the
  // nearest double.
  long double ap = 0.0L;
  int tp = 0, fp = 0;
  for (const Block& b : blocks) {
    tp += b.pos;
    fp += b.neg;
    if (b.pos == 0) continue;
    ap += b.pos * (static_cast<long double>(tp) / (tp + fp));
  }
  return static_cast<double>(ap / pos);
}

std::vector<RocPoint> RocCurve(std::span<const double> scores,
                               Positives positives) {
  const std::vector<Block> blocks = DescendingBlocks(scores, positives);
  int pos, neg;
  Totals(blocks, &pos, &neg);
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kDegenerateClass, "ROC needs positives and negatives");
  }
  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  int tp = 0, fp = 0;
  for (const Block& b : blocks) {
    tp += b.pos;
    fp += b.neg;
    curve.push_back({static_cast<double>(fp) / neg,
                     static_cast<double>(tp) / pos, b.score});
  }
  return curve;
}

std::vector<PrPoint> PrCurve(std::span<const double> scores,
                             Positives positives) {
  const std::vector<Block> blocks = DescendingBlocks(scores, positives);
  int pos, neg;
  Totals(blocks, &pos, &neg);
  if (pos == 0) {
    throw Error(ErrorCode::kDegenerateClass, "PR curve needs a positive");
  }
  std::vector<PrPoint> curve;
  int tp = 0, fp = 0;
  for (const Block& b : blocks) {
    tp += b.pos;
    fp += b.neg;
    curve.push_back({static_cast<double>(tp) / pos,
                     static_cast<double>(tp) / (tp + fp), b.score});
  }
  return curve;
}

double TrapezoidArea(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) *
            (curve[i].tpr + curve[i - 1].tpr) * 0.5;
  }
  return area;
}

bool EvalReport::valid() const {
  return std::isfinite(macro_auc) && std::isfinite(macro_ap);
}

EvalReport MacroMetrics(const ScoreMatrix& m, int fold) {
  const Eigen::Index n = m.scores.rows();
  const Eigen::Index c = m.scores.cols();
  if (static_cast<Eigen::Index>(m.labels.size()) != n ||
      (!m.overlap_sets.empty() &&
       static_cast<Eigen::Index>(m.overlap_sets.size()) != n)) {
    throw Error(ErrorCode::kShapeMismatch,
                "score matrix has " + std::to_string(n) + " rows but " +
                    std::to_string(m.labels.size()) + " labels");
  }
  if (!m.scores.allFinite()) {
    throw Error(ErrorCode::kNonFiniteValue, "score matrix has non-finite entries");
  }
  for (int label : m.labels) {
    if (label < 0 || label >= c) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(label) + " out of range");
    }
  }

  EvalReport report;
  report.fold = fold;
  report.num_segments = static_cast<int>(n);
  std::vector<double> column(n);
  std::vector<std::uint8_t> positive(n);
  double auc_sum = 0.0, ap_sum = 0.0;
  int included = 0;
  for (Eigen::Index k = 0; k < c; ++k) {
    ClassMetrics cm;
    cm.class_index = static_cast<int>(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      column[i] = m.scores(i, k);
      positive[i] = m.labels[i] == k;
      (positive[i] ? cm.positives : cm.negatives)++;
    }
    cm.degenerate = cm.positives == 0 || cm.negatives == 0;
    if (cm.degenerate) {
      cm.auc = std::numeric_limits<double>::quiet_NaN();
      cm.ap = std::numeric_limits<double>::quiet_NaN();
      report.excluded_classes.push_back(cm.class_index);
    } else {
      cm.auc = RocAuc(column, positive);
      cm.ap = AveragePrecision(column, positive);
      cm.roc = RocCurve(column, positive);
      cm.pr = PrCurve(column, positive);
      auc_sum += cm.auc;
      ap_sum += cm.ap;
      ++included;
    }
    report.classes.push_back(std::move(cm));
  }
  if (included == 0) {
    throw Error(ErrorCode::kAllClassesDegenerate,
                "no class has both positives and negatives");
  }
  report.macro_auc = auc_sum / included;
  report.macro_ap = ap_sum / included;

  int hits = 0, overlap_hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index arg;
    m.scores.row(i).maxCoeff(&arg);
    hits += arg == m.labels[i];
    if (m.overlap_sets.empty()) {
      overlap_hits += arg == m.labels[i];
    } else {
      const auto& set = m.overlap_sets[i];
      overlap_hits += std::find(set.begin(), set.end(), arg) != set.end() ||
                      arg == m.labels[i];
    }
  }
  report.accuracy = n > 0 ? static_cast<double>(hits) / n : 0.0;
  report.any_overlap_accuracy =
      n > 0 ? static_cast<double>(overlap_hits) / n : 0.0;
  return report;
}

EvalReport DegenerateReport(int fold, int num_classes) {
  EvalReport r;
  r.fold = fold;
  r.macro_auc = std::numeric_limits<double>::quiet_NaN();
  r.macro_ap = std::numeric_limits<double>::quiet_NaN();
  r.accuracy = std::numeric_limits<double>::quiet_NaN();
  r.any_overlap_accuracy = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < num_classes; ++k) r.excluded_classes.push_back(k);
  return r;
}

FoldSummary FoldAverage(std::span<const EvalReport> reports) {
  if (reports.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no fold reports to average");
  }
  FoldSummary s;
  double auc = 0.0, ap = 0.0, acc = 0.0, any = 0.0;
  int used = 0;
  for (const EvalReport& r : reports) {
    s.folds.push_back(r.fold);
    s.fold_auc.push_back(r.macro_auc);
    s.fold_ap.push_back(r.macro_ap);
    if (!r.valid()) {
      s.excluded_folds.push_back(r.fold);
      continue;
    }
    auc += r.macro_auc;
    ap += r.macro_ap;
    acc += r.accuracy;
    any += r.any_overlap_accuracy;
    ++used;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.mean_auc = used > 0 ? auc / used : nan;
  s.mean_ap = used > 0 ? ap / used : nan;
  s.mean_accuracy = used > 0 ? acc / used : nan;
  s.mean_any_overlap_accuracy = used > 0 ? any / used : nan;
  return s;
}

}  // namespace callprobe::eval
