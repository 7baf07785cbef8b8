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

#ifndef CALLPROBE_EVAL_CURVES_H_
#define CALLPROBE_EVAL_CURVES_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "callprobe/eval/metrics.h"

namespace callprobe::eval {

// Mean TPR across curves at `grid_points` evenly spaced FPR values in [0,1],
// each curve linearly interpolated (on vertical runs the highest TPR at that
// FPR is used). Thresholds in the result are NaN.
std::vector<RocPoint> VerticalAverageRoc(
    std::span<const std::vector<RocPoint>> curves, int grid_points = 101);

// Mean precision across curves at evenly spaced recall values, each curve
// read as a step function (precision of the first point reaching that
// recall).
std::vector<PrPoint> AveragePr(std::span<const std::vector<PrPoint>> curves,
                               int grid_points = 101);

// CSV with header "fpr,tpr,threshold" / "recall,precision,threshold".
void WriteRocCsv(const std::filesystem::path& path,
                 std::span<const RocPoint> curve);
void WritePrCsv(const std::filesystem::path& path,
                std::span<const PrPoint> curve);

// "<fold>_<class>_<kind>.csv" with the class name reduced to [A-Za-z0-9_-];
// `fold` is e.g. "fold3" or "mean".
std::string CurveFileName(std::string_view fold, std::string_view class_name,
                          std::string_view kind);

// Writes per-class ROC and PR files for one report into `dir`.
void ExportReportCurves(const std::filesystem::path& dir,
                        const EvalReport& report,
                        std::span<const std::string> class_names);

// Writes per-class fold-averaged curves ("mean_<class>_roc.csv", ...) over
// the valid reports.
void ExportAveragedCurves(const std::filesystem::path& dir,
                          std::span<const EvalReport> reports,
                          std::span<const std::string> class_names);

}  // namespace callprobe::eval

#endif  // CALLPROBE_EVAL_CURVES_H_
