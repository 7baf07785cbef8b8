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

#include "callprobe/eval/curves.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "callprobe/common/error.h"

namespace callprobe::eval {
namespace {

double GridValue(int i, int grid_points) {
  return grid_points == 1 ? 0.0 : static_cast<double>(i) / (grid_points - 1);
}

double TprAt(const std::vector<RocPoint>& c, double fpr) {
  // Last point with fpr <= x carries the highest TPR at or before x.
  std::size_t lo = 0;
  while (lo + 1 < c.size() && c[lo + 1].fpr <= fpr) ++lo;
  if (lo + 1 == c.size() || c[lo].fpr == fpr) return c[lo].tpr;
  const RocPoint& a = c[lo];
  const RocPoint& b = c[lo + 1];
  return a.tpr + (b.tpr - a.tpr) * (fpr - a.fpr) / (b.fpr - a.fpr);
}

double PrecisionAt(const std::vector<PrPoint>& c, double recall) {
  for (const PrPoint& p : c) {
    if (p.recall >= recall) return p.precision;
  }
  return c.empty() ? 0.0 : c.back().precision;
}

std::ofstream OpenCsv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::vector<RocPoint> VerticalAverageRoc(
    std::span<const std::vector<RocPoint>> curves, int grid_points) {
  if (curves.empty() || grid_points < 1) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to average");
  }
  std::vector<RocPoint> out;
  for (int i = 0; i < grid_points; ++i) {
    const double fpr = GridValue(i, grid_points);
    double sum = 0.0;
    for (const auto& c : curves) sum += TprAt(c, fpr);
    out.push_back({fpr, sum / curves.size(),
                   std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

std::vector<PrPoint> AveragePr(std::span<const std::vector<PrPoint>> curves,
                               int grid_points) {
  if (curves.empty() || grid_points < 1) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to average");
  }
  std::vector<PrPoint> out;
  for (int i = 0; i < grid_points; ++i) {
    const double recall = GridValue(i, grid_points);
    double sum = 0.0;
    for (const auto& c : curves) sum += PrecisionAt(c, recall);
    out.push_back({recall, sum / curves.size(),
                   std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

void WriteRocCsv(const std::filesystem::path& path,
                 std::span<const RocPoint> curve) {
  std::ofstream out = OpenCsv(path);
  out << "fpr,tpr,threshold\n";
  for (const RocPoint& p : curve) {
    out << p.fpr << ',' << p.tpr << ',' << p.threshold << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

void WritePrCsv(const std::filesystem::path& path,
                std::span<const PrPoint> curve) {
  std::ofstream out = OpenCsv(path);
  out << "recall,precision,threshold\n";
  for (const PrPoint& p : curve) {
    out << p.recall << ',' << p.precision << ',' << p.threshold << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

std::string CurveFileName(std::string_view fold, std::string_view class_name,
                          std::string_view kind) {
  std::string cls;
  for (char ch : class_name) {
    const unsigned char u = static_cast<unsigned char>(ch);
    cls += std::isalnum(u) || ch == '-' || ch == '_' ? ch : '_';
  }
  return std::string(fold) + "_" + cls + "_" + std::string(kind) + ".csv";
}

void ExportReportCurves(const std::filesystem::path& dir,
                        const EvalReport& report,
                        std::span<const std::string> class_names) {
  std::filesystem::create_directories(dir);
  const std::string fold = "fold" + std::to_string(report.fold);
  for (const ClassMetrics& cm : report.classes) {
    if (cm.degenerate) continue;
    const std::string& name = class_names[cm.class_index];
    WriteRocCsv(dir / CurveFileName(fold, name, "roc"), cm.roc);
    WritePrCsv(dir / CurveFileName(fold, name, "pr"), cm.pr);
  }
}

void ExportAveragedCurves(const std::filesystem::path& dir,
                          std::span<const EvalReport> reports,
                          std::span<const std::string> class_names) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < class_names.size(); ++k) {
    std::vector<std::vector<RocPoint>> rocs;
    std::vector<std::vector<PrPoint>> prs;
    for (const EvalReport& r : reports) {
      if (!r.valid() || k >= r.classes.size() || r.classes[k].degenerate) continue;
      rocs.push_back(r.classes[k].roc);
      prs.push_back(r.classes[k].pr);
    }
    if (rocs.empty()) continue;
    WriteRocCsv(dir / CurveFileName("mean", class_names[k], "roc"),
                VerticalAverageRoc(rocs));
    WritePrCsv(dir / CurveFileName("mean", class_names[k], "pr"), AveragePr(prs));
  }
}

}  // namespace callprobe::eval
