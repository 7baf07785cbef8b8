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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "callprobe/common/error.h"
#include "callprobe/dataset/fold_plan.h"
#include "callprobe/dsp/wav.h"
#include "callprobe/experiment/baseline_store.h"
#include "callprobe/experiment/experiment_spec.h"
#include "callprobe/experiment/layerwise.h"
#include "callprobe/experiment/probe_data.h"
#include "callprobe/experiment/results.h"
#include "callprobe/experiment/runner.h"
#include "callprobe/experiment/synthetic.h"
#include "callprobe/store/embedding_store.h"
#include "test_util.h"

namespace callprobe::experiment {
namespace {

namespace fs = std::filesystem;
using ::callprobe::testing::ScopedTempDir;
using ::callprobe::testing::ThrownCode;
using probe::ProbeConfig;
using probe::ProbeFamily;

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SyntheticOptions SmallOptions(double separation) {
  SyntheticOptions o;
  o.per_class = 30;
  o.dim = 8;
  o.separation = separation;
  o.seed = 5;
  return o;
}

// Writes a synthetic store into `dir` and returns a spec over it.
ExperimentSpec SyntheticSpec(const fs::path& dir, const SyntheticOptions& o) {
  WriteSynthetic(dir, "synth", GenerateSynthetic(o));
  ExperimentSpec spec;
  spec.stores = {{o.layer_tag, dir / "synth.embs"}};
  spec.fold_plan = dir / "folds.json";
  spec.output_dir = dir / "out";
  spec.seed = 11;
  return spec;
}

GridPointResult Point(double lr, int hidden, int layers, double dropout,
                      double mean_loss, bool aborted = false) {
  GridPointResult p;
  p.config.family = ProbeFamily::kGru;
  p.config.learning_rate = lr;
  p.config.hidden = hidden;
  p.config.num_layers = layers;
  p.config.dropout = dropout;
  p.mean_dev_loss = mean_loss;
  p.aborted = aborted;
  return p;
}

TEST(ExperimentSpecTest, ParsesStoresTrainingAndGrid) {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "layer_tags": ["feat", "layer01"],
    "store_template": "stores/{tag}.embs",
    "fold_plan": "folds.json",
    "families": ["lr", "gru"],
    "grid": {"learning_rate": [0.01], "hidden": [8, 16]},
    "training": {"batch_size": 8, "max_epochs": 5},
    "final_fit": "best_inner",
    "seed": 9
  })");
  const ExperimentSpec spec = ParseExperimentSpec(j, "/data/run");
  ASSERT_EQ(spec.stores.size(), 2u);
  EXPECT_EQ(spec.stores[1].layer_tag, "layer01");
  EXPECT_EQ(spec.stores[1].path, fs::path("/data/run/stores/layer01.embs"));
  EXPECT_EQ(spec.fold_plan, fs::path("/data/run/folds.json"));
  EXPECT_EQ(spec.families,
            (std::vector<ProbeFamily>{ProbeFamily::kLogistic, ProbeFamily::kGru}));
  EXPECT_EQ(spec.grid.learning_rate, std::vector<double>{0.01});
  EXPECT_EQ(spec.grid.hidden, (std::vector<int>{8, 16}));
  EXPECT_EQ(spec.grid.num_layers, (std::vector<int>{1, 2}));
  EXPECT_EQ(spec.batch_size, 8);
  EXPECT_EQ(spec.max_epochs, 5);
  EXPECT_EQ(spec.final_fit, FinalFit::kBestInner);
  EXPECT_EQ(spec.seed, 9u);
}

TEST(ExperimentSpecTest, RejectsInvalidDocuments) {
  const auto parse = [](const char* text) {
    ParseExperimentSpec(nlohmann::json::parse(text), ".");
  };
  EXPECT_EQ(ThrownCode([&] { parse(R"({"fold_plan": "f.json"})"); }),
            ErrorCode::kInvalidSpec);
  EXPECT_EQ(ThrownCode([&] {
              parse(R"({"store": "a.embs", "fold_plan": "f.json", "colour": 1})");
            }),
            ErrorCode::kInvalidSpec);
  EXPECT_EQ(ThrownCode([&] {
              parse(R"({"store": "a.embs", "fold_plan": "f.json",
                        "grid": {"learning_rate": []}})");
            }),
            ErrorCode::kInvalidSpec);
  EXPECT_EQ(ThrownCode([&] {
              parse(R"({"store": "a.embs", "fold_plan": "f.json",
                        "families": ["svm"]})");
            }),
            ErrorCode::kInvalidSpec);
}

TEST(ExperimentSpecTest, MissingFilesAreInvalidSpec) {
  ScopedTempDir dir;
  ExperimentSpec spec = SyntheticSpec(dir.path(), SmallOptions(5));
  EXPECT_NO_THROW(CheckSpecFiles(spec));
  spec.stores.push_back({"other", dir / "missing.embs"});
  EXPECT_EQ(ThrownCode([&] { CheckSpecFiles(spec); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(ThrownCode([&] { RunExperiment(spec); }), ErrorCode::kInvalidSpec);
}

TEST(ExpandGridTest, CollapsesUnusedFields) {
  ExperimentSpec spec;
  EXPECT_EQ(ExpandGrid(spec, ProbeFamily::kLogistic).size(), 4u);
  EXPECT_EQ(ExpandGrid(spec, ProbeFamily::kMlp).size(), 16u);
  // 4 rates x 4 sizes x (one layer without dropout + two layers x 4 dropouts).
  EXPECT_EQ(ExpandGrid(spec, ProbeFamily::kLstm).size(), 80u);
}

TEST(ExpandGridTest, SortedByTieBreakOrder) {
  ExperimentSpec spec;
  spec.seed = 3;
  spec.max_epochs = 7;
  const auto grid = ExpandGrid(spec, ProbeFamily::kGru);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end(), TieBreakLess));
  EXPECT_EQ(grid.front().learning_rate, 1e-6);
  EXPECT_EQ(grid.front().hidden, 32);
  EXPECT_EQ(grid.front().num_layers, 1);
  for (const ProbeConfig& c : grid) {
    EXPECT_EQ(c.family, ProbeFamily::kGru);
    EXPECT_EQ(c.max_epochs, 7);
    if (c.num_layers == 1) EXPECT_EQ(c.dropout, 0.0);
  }
}

TEST(ExpandGridTest, TieBreakPrefersLowerRateThenSmallerThenShallowerThenLessDropout) {
  const ProbeConfig base = Point(1e-3, 64, 2, 0.2, 0).config;
  ProbeConfig c = base;
  c.learning_rate = 1e-4;
  c.hidden = 256;
  EXPECT_TRUE(TieBreakLess(c, base));
  c = base;
  c.hidden = 32;
  c.num_layers = 2;
  c.dropout = 0.8;
  EXPECT_TRUE(TieBreakLess(c, base));
  c = base;
  c.num_layers = 1;
  c.dropout = 0.4;
  EXPECT_TRUE(TieBreakLess(c, base));
  c = base;
  c.dropout = 0.0;
  EXPECT_TRUE(TieBreakLess(c, base));
  EXPECT_FALSE(TieBreakLess(base, base));
}

TEST(SelectGridPointTest, PicksLowestMeanDevLoss) {
  const std::vector<GridPointResult> table = {Point(1e-4, 32, 1, 0, 0.50),
                                              Point(1e-3, 32, 1, 0, 0.49)};
  EXPECT_EQ(SelectGridPoint(table), 1);
}

TEST(SelectGridPointTest, TieGoesToTieBreakOrder) {
  std::vector<GridPointResult> table = {
      Point(1e-3, 32, 1, 0, 0.3),   Point(1e-4, 64, 2, 0.4, 0.3),
      Point(1e-4, 32, 2, 0.2, 0.3), Point(1e-4, 32, 2, 0.0, 0.3),
      Point(1e-4, 32, 1, 0, 0.31)};
  std::sort(table.begin(), table.end(),
            [](const GridPointResult& a, const GridPointResult& b) {
              return TieBreakLess(a.config, b.config);
            });
  const int s = SelectGridPoint(table);
  ASSERT_GE(s, 0);
  EXPECT_EQ(table[s].config.learning_rate, 1e-4);
  EXPECT_EQ(table[s].config.hidden, 32);
  EXPECT_EQ(table[s].config.num_layers, 2);
  EXPECT_EQ(table[s].config.dropout, 0.0);
}

TEST(SelectGridPointTest, SkipsAbortedPoints) {
  std::vector<GridPointResult> table = {Point(1e-3, 32, 1, 0, 0.1, true),
                                        Point(1e-2, 32, 1, 0, 0.7)};
  EXPECT_EQ(SelectGridPoint(table), 1);
  table[1].aborted = true;
  EXPECT_EQ(SelectGridPoint(table), -1);
}

class OuterTurnTest : public ::testing::Test {
 protected:
  void SetUp() override {
    spec_ = SyntheticSpec(dir_.path(), SmallOptions(5));
    spec_.grid.learning_rate = {1e-2, 1e-3, 1e-4};
    spec_.max_epochs = 20;
    plan_.emplace(dataset::FoldPlan::Load(spec_.fold_plan));
    data_ = LoadProbeData(spec_.stores[0], *plan_, spec_.grid_mode);
    examples_ = BuildExamples(data_, ProbeFamily::kLogistic);
  }

  ScopedTempDir dir_;
  ExperimentSpec spec_;
  std::optional<dataset::FoldPlan> plan_;
  ProbeData data_;
  std::vector<probe::Example> examples_;
};

TEST_F(OuterTurnTest, ProtocolArithmeticAndSelection) {
  const RunResult r = RunOuterTurn(spec_, *plan_, data_, examples_,
                                   ProbeFamily::kLogistic, 2);
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.test_fold, plan_->outer_turns()[2].test_fold);
  // Three learning rates, four inner turns each.
  ASSERT_EQ(r.table.size(), 3u);
  EXPECT_EQ(r.inner_trainings, 12);
  for (const GridPointResult& p : r.table) {
    EXPECT_EQ(p.dev_loss.size(), 4u);
    double sum = 0.0;
    for (double l : p.dev_loss) sum += l;
    EXPECT_NEAR(p.mean_dev_loss, sum / 4, 1e-12);
  }
  EXPECT_EQ(r.selected, SelectGridPoint(r.table));
  for (std::size_t i = 0; i < r.table.size(); ++i) {
    EXPECT_GE(r.table[i].mean_dev_loss, r.table[r.selected].mean_dev_loss);
  }
  EXPECT_GT(r.leakage_checks, 0u);
  for (std::uint64_t id : r.test_segment_ids) {
    EXPECT_EQ(plan_->FoldOf(id), r.test_fold);
  }
  EXPECT_EQ(r.test_segment_ids.size(),
            plan_->SegmentsIn(std::vector<int>{r.test_fold}).size());
  EXPECT_EQ(r.primary.fit, FinalFit::kRetrain);
  EXPECT_EQ(r.alternate.fit, FinalFit::kBestInner);
  EXPECT_EQ(r.primary.scores.rows(),
            static_cast<Eigen::Index>(r.test_segment_ids.size()));
  EXPECT_TRUE(r.primary_model.has_value());
}

TEST_F(OuterTurnTest, LeakageAssertionFiresOnTestFoldIndex) {
  const int test_fold = plan_->outer_turns()[0].test_fold;
  std::vector<int> others;
  for (int f = 0; f < plan_->k(); ++f) {
    if (f != test_fold) others.push_back(f);
  }
  std::vector<std::size_t> indices = IndicesInFolds(data_, others);
  std::atomic<std::uint64_t> checks{0};
  EXPECT_NO_THROW(GatherTrainingSet(data_, examples_, indices, test_fold, checks));
  EXPECT_EQ(checks.load(), indices.size());
  const std::vector<std::size_t> test = IndicesInFolds(data_, std::vector<int>{test_fold});
  indices.push_back(test.front());
  EXPECT_THROW(GatherTrainingSet(data_, examples_, indices, test_fold, checks),
               std::logic_error);
}

TEST(SyntheticTest, SameSeedGivesIdenticalBytes) {
  ScopedTempDir a, b;
  const SyntheticOptions o = SmallOptions(5);
  WriteSynthetic(a.path(), "s", GenerateSynthetic(o));
  WriteSynthetic(b.path(), "s", GenerateSynthetic(o));
  for (const char* name : {"s.embs", "s.json", "folds.json"}) {
    EXPECT_EQ(ReadBytes(a / name), ReadBytes(b / name)) << name;
  }
}

TEST(SyntheticTest, ValueStreamOnlyChangesFrames) {
  const SyntheticOptions o = SmallOptions(5);
  const SyntheticData x = GenerateSynthetic(o, 0);
  const SyntheticData y = GenerateSynthetic(o, 1);
  EXPECT_EQ(x.manifest, y.manifest);
  EXPECT_TRUE(x.plan == y.plan);
  EXPECT_NE(x.sequences[0].values, y.sequences[0].values);
}

TEST(SyntheticTest, ShapesAndBalance) {
  SyntheticOptions o = SmallOptions(3);
  o.min_frames = 2;
  o.max_frames = 5;
  const SyntheticData d = GenerateSynthetic(o);
  ASSERT_EQ(d.sequences.size(), 120u);
  std::vector<int> per_class(4, 0);
  for (std::size_t i = 0; i < d.sequences.size(); ++i) {
    const auto rows = d.sequences[i].values.rows();
    EXPECT_GE(rows, 2);
    EXPECT_LE(rows, 5);
    EXPECT_EQ(d.sequences[i].values.cols(), 8);
    ++per_class[d.manifest.segments[i].label];
  }
  EXPECT_EQ(per_class, std::vector<int>(4, 30));
}

TEST(EndToEndTest, SeparableAndChanceLevelData) {
  ScopedTempDir sep_dir, chance_dir;
  SyntheticOptions o;
  o.per_class = 60;
  o.separation = 5;
  const ExperimentResult sep = RunExperiment(SyntheticSpec(sep_dir.path(), o));
  ASSERT_FALSE(sep.partial_failure);
  EXPECT_GE(sep.runs[0].summary.mean_auc, 0.99);
  EXPECT_GE(sep.runs[0].summary.mean_ap, 0.95);

  o.per_class = 125;
  o.separation = 0;
  const ExperimentResult chance =
      RunExperiment(SyntheticSpec(chance_dir.path(), o));
  ASSERT_FALSE(chance.partial_failure);
  EXPECT_GE(chance.runs[0].summary.mean_auc, 0.45);
  EXPECT_LE(chance.runs[0].summary.mean_auc, 0.55);
}

TEST(EndToEndTest, RerunAndParallelismGiveIdenticalFiles) {
  ScopedTempDir dir;
  ExperimentSpec spec = SyntheticSpec(dir.path(), SmallOptions(2));
  spec.families = {ProbeFamily::kLogistic, ProbeFamily::kMlp};
  spec.grid.learning_rate = {1e-2, 1e-3};
  spec.grid.dropout = {0.0, 0.4};
  spec.max_epochs = 15;
  std::vector<std::string> results, summaries;
  for (int parallelism : {1, 1, 8}) {
    spec.parallelism = parallelism;
    spec.output_dir = dir / ("out" + std::to_string(results.size()));
    RunAndWriteExperiment(spec);
    results.push_back(ReadBytes(spec.output_dir / "results.json"));
    summaries.push_back(ReadBytes(spec.output_dir / "summary.csv"));
  }
  EXPECT_FALSE(results[0].empty());
  EXPECT_EQ(results[0], results[1]);
  EXPECT_EQ(results[0], results[2]);
  EXPECT_EQ(summaries[0], summaries[2]);
  EXPECT_EQ(ReadBytes(dir / "out0" / "final" / "mlp" / "checkpoints" / "fold0.ckpt"),
            ReadBytes(dir / "out2" / "final" / "mlp" / "checkpoints" / "fold0.ckpt"));
}

TEST(EndToEndTest, WritesArtifactsAndRegeneratesReport) {
  ScopedTempDir dir;
  ExperimentSpec spec = SyntheticSpec(dir.path(), SmallOptions(3));
  spec.grid.learning_rate = {1e-2};
  spec.dataset = "elev";
  RunAndWriteExperiment(spec);
  const fs::path run = spec.output_dir / "final" / "lr";
  for (int k = 0; k < 5; ++k) {
    const std::string fold = "fold" + std::to_string(k);
    EXPECT_TRUE(fs::exists(run / "reports" / (fold + ".json")));
    EXPECT_TRUE(fs::exists(run / "checkpoints" / (fold + ".ckpt")));
    EXPECT_TRUE(fs::exists(run / "curves" / (fold + "_class0_roc.csv")));
  }
  EXPECT_TRUE(fs::exists(run / "curves" / "mean_class3_pr.csv"));
  const std::string text = ReadBytes(spec.output_dir / "summary.txt");
  EXPECT_NE(text.find("AERD"), std::string::npos);
  EXPECT_NE(text.find("0.8710"), std::string::npos);

  const fs::path regen = dir / "regen";
  RegenerateReport(spec.output_dir / "results.json", regen);
  EXPECT_EQ(ReadBytes(regen / "summary.csv"), ReadBytes(spec.output_dir / "summary.csv"));
  EXPECT_EQ(ReadBytes(regen / "final" / "lr" / "curves" / "mean_class0_roc.csv"),
            ReadBytes(run / "curves" / "mean_class0_roc.csv"));

  // A results file whose metrics disagree with its scores is rejected.
  nlohmann::json j = nlohmann::json::parse(ReadBytes(spec.output_dir / "results.json"));
  j["runs"][0]["turns"][0]["primary"]["report"]["macro_auc"] = 0.25;
  std::ofstream(dir / "tampered.json") << j.dump();
  EXPECT_EQ(ThrownCode([&] { RegenerateReport(dir / "tampered.json", dir / "t"); }),
            ErrorCode::kFormatError);
}

TEST(EndToEndTest, RecurrentFamilyOnNonTemporalStoreIsReported) {
  ScopedTempDir dir;
  SyntheticData d = GenerateSynthetic(SmallOptions(5));
  d.manifest.temporal = false;
  WriteSynthetic(dir.path(), "flat", d);
  ExperimentSpec spec;
  spec.stores = {{"final", dir / "flat.embs"}};
  spec.fold_plan = dir / "folds.json";
  spec.families = {ProbeFamily::kGru};
  const ExperimentResult r = RunExperiment(spec);
  EXPECT_TRUE(r.partial_failure);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_FALSE(r.runs[0].error.empty());
}

TEST(LayerwiseTest, PeaksAtSeparableLayer) {
  ScopedTempDir dir;
  SyntheticOptions o = SmallOptions(5);
  const std::vector<std::string> tags = WriteLayerStack(dir.path(), o, 12, 2);
  ASSERT_EQ(tags.size(), 13u);
  EXPECT_EQ(tags.front(), "feat");
  EXPECT_EQ(tags.back(), "layer12");
  ExperimentSpec spec;
  for (const std::string& t : tags) spec.stores.push_back({t, dir / (t + ".embs")});
  spec.fold_plan = dir / "folds.json";
  const LayerwiseTable table = LayerwiseSweep(spec);
  ASSERT_EQ(table.rows.size(), 13u);
  EXPECT_EQ(table.ArgmaxLayer(), 2);
  EXPECT_EQ(table.rows[2].layer_tag, "layer02");
  EXPECT_EQ(table.rows[2].inner_map.size(), 4u);

  WriteLayerwiseCsv(dir / "layers.csv", table);
  std::ifstream in(dir / "layers.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "layer_index,layer_tag,dev_map,dev_auc");
}

TEST(LayerwiseTest, DuplicatedStoreGivesFlatCurve) {
  ScopedTempDir dir;
  const ExperimentSpec base = SyntheticSpec(dir.path(), SmallOptions(1));
  ExperimentSpec spec = base;
  spec.stores.clear();
  for (int i = 0; i < 13; ++i) {
    spec.stores.push_back({"copy" + std::to_string(i), base.stores[0].path});
  }
  const LayerwiseTable table = LayerwiseSweep(spec);
  ASSERT_EQ(table.rows.size(), 13u);
  for (const LayerwiseRow& r : table.rows) {
    EXPECT_NEAR(r.dev_map, table.rows[0].dev_map, 1e-9);
  }
}

TEST(LayerwiseTest, MissingLayerStore) {
  ScopedTempDir dir;
  ExperimentSpec spec = SyntheticSpec(dir.path(), SmallOptions(1));
  spec.stores.push_back({"layer01", dir / "layer01.embs"});
  EXPECT_EQ(ThrownCode([&] { LayerwiseSweep(spec); }),
            ErrorCode::kMissingLayerStore);
}

// Two recordings of tones; one annotation is shorter than an MFCC frame.
class BaselineStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* rec : {"rec_a", "rec_b"}) {
      std::vector<double> samples(16000);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = 0.3 * std::sin(2 * M_PI * (rec[4] == 'a' ? 440 : 1200) * i / 16000.0);
      }
      dsp::WriteWavPcm16(dir_ / (std::string(rec) + ".wav"), samples, 16000, 1);
    }
    std::ofstream(dir_ / "ann.tsv") << "rec_a\t0.10\t0.40\trumble\n"
                                       "rec_a\t0.50\t0.90\troar\n"
                                       "rec_b\t0.20\t0.60\trumble\n"
                                       "rec_b\t0.70\t0.71\troar\n";
    options_.annotations = dir_ / "ann.tsv";
    options_.audio_dir = dir_.path();
    options_.out = dir_ / "base.embs";
    options_.collar = 0.0;
  }

  ScopedTempDir dir_;
  BaselineOptions options_;
};

TEST_F(BaselineStoreTest, MfccStoreIsTemporal) {
  const BaselineSummary s = BuildBaselineStore(options_);
  EXPECT_EQ(s.written, 3);
  ASSERT_EQ(s.skipped.size(), 1u);
  const store::Store st = store::ReadStore(options_.out);
  EXPECT_EQ(st.manifest.layer_tag, "mfcc");
  EXPECT_TRUE(st.manifest.temporal);
  EXPECT_EQ(st.manifest.dim, 40u);
  EXPECT_EQ(st.manifest.classes, (std::vector<std::string>{"roar", "rumble"}));
  ASSERT_EQ(st.sequences.size(), 3u);
  // 0.3 s at 16 kHz: 4800 samples, 400-sample frames, 160-sample stride.
  EXPECT_EQ(st.sequences[0].values.rows(), 28);
  EXPECT_EQ(st.manifest.segments[0].label, 1);
}

TEST_F(BaselineStoreTest, BeansStoreHasOneRowPerSegment) {
  options_.kind = BaselineKind::kBeans;
  options_.beans_ceps = 20;
  BuildBaselineStore(options_);
  const store::Store st = store::ReadStore(options_.out);
  EXPECT_FALSE(st.manifest.temporal);
  EXPECT_EQ(st.manifest.dim, 80u);
  for (const auto& seq : st.sequences) EXPECT_EQ(seq.values.rows(), 1);
}

TEST_F(BaselineStoreTest, FoldPlanNeedsAsManyRecordingsAsFolds) {
  EXPECT_EQ(ThrownCode([&] {
              BuildFoldPlanFile(options_.annotations, options_.audio_dir, 0.25,
                                3, 1, dir_ / "plan.json");
            }),
            ErrorCode::kTooFewRecordings);
}

}  // namespace
}  // namespace callprobe::experiment
