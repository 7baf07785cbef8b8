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

#ifndef CALLPROBE_EVAL_METRICS_H_
#define CALLPROBE_EVAL_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace callprobe::eval {

// Binary inputs use one byte per item: nonzero marks a positive.
using Positives = std::span<const std::uint8_t>;

// Mann-Whitney U over (#pos * #neg), tied pairs credited 0.5. Sort based.
// Throws kDegenerateClass without both positives and negatives.
double RocAuc(std::span<const double> scores, Positives positives);

// Step-wise AP: sum over descending distinct thresholds of
// (R_k - R_{k-1}) * P_k, equal scores forming one block. Throws
// kDegenerateClass without positives.
double AveragePrecision(std::span<const double> scores, Positives positives);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0,0) start
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

// One point per distinct score, highest first; the ROC curve also starts at
// (0,0) and so ends at (1,1). The trapezoidal area equals RocAuc.
std::vector<RocPoint> RocCurve(std::span<const double> scores,
                               Positives positives);
std::vector<PrPoint> PrCurve(std::span<const double> scores,
                             Positives positives);

double TrapezoidArea(std::span<const RocPoint> curve);

struct ScoreMatrix {
  Eigen::MatrixXd scores;  // N x C
  std::vector<int> labels;  // primary class per row
  // Classes of every call overlapping each segment (for any-overlap
  // accuracy); may be left empty.
  std::vector<std::vector<int>> overlap_sets;
};

struct ClassMetrics {
  int class_index = 0;
  int positives = 0;
  int negatives = 0;
  bool degenerate = false;  // excluded from the macro means
  double auc = 0.0;
  double ap = 0.0;
  std::vector<RocPoint> roc;
  std::vector<PrPoint> pr;
};

struct EvalReport {
  int fold = -1;
  std::vector<ClassMetrics> classes;
  std::vector<int> excluded_classes;
  double macro_auc = 0.0;  // NaN when every class is degenerate
  double macro_ap = 0.0;
  double accuracy = 0.0;              // argmax == primary label
  double any_overlap_accuracy = 0.0;  // argmax in the overlap set
  int num_segments = 0;

  bool valid() const;
};

// One-vs-rest metrics per class with unweighted macro means over the
// non-degenerate classes. Throws kShapeMismatch on inconsistent sizes,
// kNonFiniteValue on non-finite scores, kAllClassesDegenerate if no class
// has both positives and negatives.
EvalReport MacroMetrics(const ScoreMatrix& m, int fold = -1);

// Report for a fold whose classes are all degenerate: NaN macro values, so
// FoldAverage skips it.
EvalReport DegenerateReport(int fold, int num_classes);

struct FoldSummary {
  std::vector<int> folds;
  std::vector<double> fold_auc;
  std::vector<double> fold_ap;
  std::vector<int> excluded_folds;  // NaN-flagged reports
  double mean_auc = 0.0;            // NaN if every fold was excluded
  double mean_ap = 0.0;
  double mean_accuracy = 0.0;
  double mean_any_overlap_accuracy = 0.0;
};

// Unweighted means across folds, skipping reports with a NaN macro value.
FoldSummary FoldAverage(std::span<const EvalReport> reports);

}  // namespace callprobe::eval

#endif  // CALLPROBE_EVAL_METRICS_H_
