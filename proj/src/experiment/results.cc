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

#include "callprobe/experiment/results.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "callprobe/common/error.h"
#include "callprobe/eval/curves.h"
#include "callprobe/probe/checkpoint.h"

namespace callprobe::experiment {
namespace {

using nlohmann::json;

constexpr int kResultsVersion = 1;

double Num(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json SummaryToJson(const eval::FoldSummary& s) {
  return {{"folds", s.folds},
          {"fold_auc", s.fold_auc},
          {"fold_ap", s.fold_ap},
          {"excluded_folds", s.excluded_folds},
          {"mean_auc", s.mean_auc},
          {"mean_ap", s.mean_ap},
          {"mean_accuracy", s.mean_accuracy},
          {"mean_any_overlap_accuracy", s.mean_any_overlap_accuracy}};
}

json MatrixRows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json EvaluationToJson(const TestEvaluation& ev,
                      std::span<const std::string> classes) {
  return {{"final_fit", FinalFitName(ev.fit)},
          {"trace", probe::ToJson(ev.trace)},
          {"report", ToJson(ev.report, classes)},
          {"scores", MatrixRows(ev.scores)}};
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

std::string Fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "---";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string CsvNumber(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string DisplayFamily(const std::string& family) {
  if (family == "lr" || family == "mlp" || family == "gru" || family == "lstm") {
    std::string up = family;
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return up;
  }
  if (family == "elman") return "Elman";
  return family;
}

SummaryRow MakeRow(const json& spec, const json& run,
                   const eval::FoldSummary& s) {
  SummaryRow row;
  const bool single_store = spec.at("stores").size() == 1;
  row.layer_tag = run.at("layer_tag").get<std::string>();
  row.embedding = single_store ? spec.at("embedding").get<std::string>() : row.layer_tag;
  row.dim = run.at("dim").get<int>();
  row.classifier = run.at("family").get<std::string>();
  row.final_fit = spec.at("final_fit").get<std::string>();
  row.auc = s.mean_auc;
  row.map = s.mean_ap;
  row.accuracy = s.mean_accuracy;
  row.any_overlap_accuracy = s.mean_any_overlap_accuracy;
  row.folds_total = static_cast<int>(s.folds.size());
  row.folds_used = row.folds_total - static_cast<int>(s.excluded_folds.size());
  row.error = run.value("error", std::string());
  return row;
}

eval::FoldSummary SummaryFromJson(const json& j) {
  eval::FoldSummary s;
  s.folds = j.at("folds").get<std::vector<int>>();
  for (const json& v : j.at("fold_auc")) s.fold_auc.push_back(Num(v));
  for (const json& v : j.at("fold_ap")) s.fold_ap.push_back(Num(v));
  s.excluded_folds = j.at("excluded_folds").get<std::vector<int>>();
  s.mean_auc = Num(j.at("mean_auc"));
  s.mean_ap = Num(j.at("mean_ap"));
  s.mean_accuracy = Num(j.at("mean_accuracy"));
  s.mean_any_overlap_accuracy = Num(j.at("mean_any_overlap_accuracy"));
  return s;
}

json LoadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

json ToJson(const eval::EvalReport& report,
            std::span<const std::string> class_names) {
  json classes = json::array();
  for (const eval::ClassMetrics& c : report.classes) {
    classes.push_back(
        {{"class", c.class_index < static_cast<int>(class_names.size())
                       ? class_names[c.class_index]
                       : std::to_string(c.class_index)},
         {"positives", c.positives},
         {"negatives", c.negatives},
         {"degenerate", c.degenerate},
         {"auc", c.auc},
         {"ap", c.ap}});
  }
  return {{"fold", report.fold},
          {"macro_auc", report.macro_auc},
          {"macro_ap", report.macro_ap},
          {"accuracy", report.accuracy},
          {"any_overlap_accuracy", report.any_overlap_accuracy},
          {"num_segments", report.num_segments},
          {"excluded_classes", report.excluded_classes},
          {"classes", std::move(classes)}};
}

json ToJson(const RunResult& run, std::span<const std::string> class_names) {
  json grid = json::array();
  for (const GridPointResult& g : run.table) {
    json reasons = json::array();
    for (probe::StopReason r : g.stop_reason) reasons.push_back(probe::StopReasonName(r));
    grid.push_back({{"config", probe::ToJson(g.config)},
                    {"dev_loss", g.dev_loss},
                    {"stop_reason", std::move(reasons)},
                    {"mean_dev_loss", g.mean_dev_loss},
                    {"aborted", g.aborted}});
  }
  json j = {{"outer_index", run.outer_index},
            {"test_fold", run.test_fold},
            {"ok", run.ok},
            {"error", run.error},
            {"inner_trainings", run.inner_trainings},
            {"leakage_checks", run.leakage_checks},
            {"grid", std::move(grid)},
            {"selected", run.selected}};
  if (run.ok) {
    j["selected_config"] = probe::ToJson(run.table[run.selected].config);
    j["test_segment_ids"] = run.test_segment_ids;
    j["test_labels"] = run.test_labels;
    j["primary"] = EvaluationToJson(run.primary, class_names);
    j["alternate"] = EvaluationToJson(run.alternate, class_names);
  }
  return j;
}

json ResultsJson(const ExperimentSpec& spec, const ExperimentResult& result) {
  json runs = json::array();
  for (const RunSet& set : result.runs) {
    json turns = json::array();
    for (const RunResult& r : set.turns) turns.push_back(ToJson(r, set.classes));
    json run = {{"layer_tag", set.layer_tag},
                {"dim", set.dim},
                {"family", probe::FamilyName(set.family)},
                {"classes", set.classes},
                {"error", set.error},
                {"turns", std::move(turns)}};
    if (set.error.empty()) {
      run["summary"] = SummaryToJson(set.summary);
      run["alternate_summary"] = SummaryToJson(set.alternate_summary);
    }
    runs.push_back(std::move(run));
  }
  return {{"format", "callprobe-results"},
          {"version", kResultsVersion},
          {"spec", ToJson(spec)},
          {"partial_failure", result.partial_failure},
          {"runs", std::move(runs)}};
}

std::vector<SummaryRow> SummaryRowsFromResults(const json& results) {
  std::vector<SummaryRow> rows;
  for (const json& run : results.at("runs")) {
    const eval::FoldSummary s = run.contains("summary")
                                    ? SummaryFromJson(run.at("summary"))
                                    : eval::FoldSummary{};
    SummaryRow row = MakeRow(results.at("spec"), run, s);
    if (!run.contains("summary")) {
      row.auc = row.map = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteSummaryCsv(const std::filesystem::path& path,
                     std::span<const SummaryRow> rows) {
  std::ostringstream out;
  out << "embedding,layer_tag,dim,classifier,final_fit,auc,map,accuracy,"
         "any_overlap_accuracy,folds_used,folds_total\n";
  for (const SummaryRow& r : rows) {
    out << r.embedding << ',' << r.layer_tag << ',' << r.dim << ','
        << r.classifier << ',' << r.final_fit << ',' << CsvNumber(r.auc) << ','
        << CsvNumber(r.map) << ',' << CsvNumber(r.accuracy) << ','
        << CsvNumber(r.any_overlap_accuracy) << ',' << r.folds_used << ','
        << r.folds_total << '\n';
  }
  WriteText(path, out.str());
}

std::string FormatSummaryText(std::span<const SummaryRow> rows,
                              const std::string& dataset) {
  std::string lower = dataset;
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::size_t width = 9;
  for (const SummaryRow& r : rows) width = std::max(width, r.embedding.size());
  auto line = [&](const std::string& emb, const std::string& dim,
                  const std::string& cls, const std::string& auc,
                  const std::string& map, const std::string& folds) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %5s  %-7s  %7s  %7s  %s\n",
                  static_cast<int>(width), emb.c_str(), dim.c_str(), cls.c_str(),
                  auc.c_str(), map.c_str(), folds.c_str());
    return std::string(buf);
  };
  std::string out;
  if (!dataset.empty()) out += "Dataset: " + dataset + "\n";
  out += "Metrics averaged over the outer (test) folds.\n\n";
  out += line("Embedding", "Dim.", "Class.", "AUC", "mAP", "Folds");
  for (const SummaryRow& r : rows) {
    std::string folds = std::to_string(r.folds_used) + "/" + std::to_string(r.folds_total);
    if (!r.error.empty()) folds = "failed";
    out += line(r.embedding, std::to_string(r.dim), DisplayFamily(r.classifier),
                Fixed(r.auc), Fixed(r.map), folds);
  }
  if (lower == "elev" || lower == "ldc") {
    out += line("AERD", "N/A", "AST-seq",
                Fixed(lower == "elev" ? kAerdAucElev : kAerdAucLdc), "---",
                "reference");
  }
  return out;
}

std::string RunDirectoryName(const std::string& layer_tag,
                             probe::ProbeFamily family) {
  return layer_tag + "/" + std::string(probe::FamilyName(family));
}

void WriteExperimentOutputs(const ExperimentSpec& spec,
                            const ExperimentResult& result) {
  const std::filesystem::path& out = spec.output_dir;
  std::filesystem::create_directories(out);
  const json results = ResultsJson(spec, result);
  WriteText(out / "results.json", results.dump(2) + "\n");
  const std::vector<SummaryRow> rows = SummaryRowsFromResults(results);
  WriteSummaryCsv(out / "summary.csv", rows);
  WriteText(out / "summary.txt", FormatSummaryText(rows, spec.dataset));

  for (const RunSet& set : result.runs) {
    const std::filesystem::path dir = out / RunDirectoryName(set.layer_tag, set.family);
    std::filesystem::create_directories(dir / "reports");
    std::filesystem::create_directories(dir / "checkpoints");
    std::vector<eval::EvalReport> reports;
    for (const RunResult& r : set.turns) {
      const std::string name = "fold" + std::to_string(r.test_fold);
      WriteText(dir / "reports" / (name + ".json"),
                ToJson(r, set.classes).dump(2) + "\n");
      if (!r.ok) continue;
      eval::ExportReportCurves(dir / "curves", r.primary.report, set.classes);
      if (r.primary_model) {
        probe::SaveCheckpoint(dir / "checkpoints" / (name + ".ckpt"),
                              *r.primary_model, r.primary.trace);
      }
      reports.push_back(r.primary.report);
    }
    if (!reports.empty()) {
      eval::ExportAveragedCurves(dir / "curves", reports, set.classes);
    }
  }
}

void RegenerateReport(const std::filesystem::path& results_path,
                      const std::filesystem::path& out_dir) {
  const json results = LoadJson(results_path);
  if (results.value("format", std::string()) != "callprobe-results") {
    throw Error(ErrorCode::kFormatError,
                results_path.string() + " is not a results file");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<SummaryRow> rows;
  try {
    for (const json& run : results.at("runs")) {
      const auto classes = run.at("classes").get<std::vector<std::string>>();
      std::vector<eval::EvalReport> reports;
      std::vector<eval::EvalReport> curve_reports;
      for (const json& turn : run.at("turns")) {
        const int fold = turn.at("test_fold").get<int>();
        if (!turn.at("ok").get<bool>()) {
          reports.push_back(eval::DegenerateReport(fold, 0));
          continue;
        }
        const json& primary = turn.at("primary");
        eval::ScoreMatrix m;
        const json& scores = primary.at("scores");
        m.scores.resize(static_cast<Eigen::Index>(scores.size()),
                        static_cast<Eigen::Index>(classes.size()));
        for (std::size_t r = 0; r < scores.size(); ++r) {
          for (std::size_t c = 0; c < classes.size(); ++c) {
            m.scores(r, c) = scores[r][c].get<double>();
          }
        }
        m.labels = turn.at("test_labels").get<std::vector<int>>();
        eval::EvalReport rep;
        try {
          rep = eval::MacroMetrics(m, fold);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kAllClassesDegenerate) throw;
          rep = eval::DegenerateReport(fold, static_cast<int>(classes.size()));
        }
        const double recorded = Num(primary.at("report").at("macro_auc"));
        if (rep.valid() && std::abs(recorded - rep.macro_auc) > 1e-12) {
          throw Error(ErrorCode::kFormatError,
                      "recomputed macro AUC for fold " + std::to_string(fold) +
                          " disagrees with the results file");
        }
        // Any-overlap accuracy needs the overlap sets, which live in the
        // store; keep the recorded values.
        rep.accuracy = Num(primary.at("report").at("accuracy"));
        rep.any_overlap_accuracy =
            Num(primary.at("report").at("any_overlap_accuracy"));
        reports.push_back(rep);
        if (rep.valid()) curve_reports.push_back(rep);
      }
      const std::string dir_name =
          run.at("layer_tag").get<std::string>() + "/" + run.at("family").get<std::string>();
      for (const eval::EvalReport& rep : curve_reports) {
        eval::ExportReportCurves(out_dir / dir_name / "curves", rep, classes);
      }
      if (!curve_reports.empty()) {
        eval::ExportAveragedCurves(out_dir / dir_name / "curves", curve_reports,
                                   classes);
      }
      const eval::FoldSummary s =
          reports.empty() ? eval::FoldSummary{} : eval::FoldAverage(reports);
      SummaryRow row = MakeRow(results.at("spec"), run, s);
      if (reports.empty()) row.auc = row.map = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, results_path.string() + ": " + e.what());
  }
  WriteSummaryCsv(out_dir / "summary.csv", rows);
  WriteText(out_dir / "summary.txt",
            FormatSummaryText(rows, results.at("spec").value("dataset", std::string())));
}

}  // namespace callprobe::experiment
