//
// Copyright 2026 The LDP Collect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include "ldp/harness.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ldp/aggregate.h"
#include "ldp/mechanisms.h"
#include "ldp/multidim.h"
#include "ldp/schema.h"
#include "status_matchers.h"

namespace ldp {
namespace {

using ::ldp::testing::IsOk;
using ::ldp::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::StartsWith;

std::string ReadAll(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string TempPath(const std::string& name) {
  return ::testing::TempDir() + "/harness_test_" + name;
}

TEST(ConfigTest, TextEntriesAndOverrides) {
  ExperimentConfig config;
  ASSERT_THAT(ApplyConfigText("# comment\n"
                              "epsilon = 0.5, 1,2\n"
                              "mechanism=pm,duchi\n"
                              "n=2000\n"
                              "runs=7\n"
                              "seed=99\n"
                              "dist=trunc-gaussian:0.5\n"
                              "lambda=0.01\n"
                              "group-size=4\n",
                              config),
              IsOk());
  EXPECT_THAT(config.epsilons, ElementsAre(0.5, 1, 2));
  EXPECT_THAT(config.mechanisms, ElementsAre("pm", "duchi"));
  EXPECT_EQ(config.n, 2000);
  EXPECT_EQ(config.runs, 7);
  EXPECT_EQ(config.seed, 99u);
  EXPECT_EQ(config.distribution, "trunc-gaussian:0.5");
  EXPECT_EQ(config.lambda, 0.01);
  EXPECT_EQ(config.group_size, 4);
  // A later entry (a command-line flag) overrides the file.
  ASSERT_THAT(ApplyConfigEntry("epsilon", "4", config), IsOk());
  EXPECT_THAT(config.epsilons, ElementsAre(4));
}

TEST(ConfigTest, Defaults) {
  const ExperimentConfig config;
  EXPECT_EQ(config.runs, 100);
  EXPECT_EQ(config.lambda, 1e-4);
  EXPECT_EQ(config.folds, 10);
}

TEST(ConfigTest, Errors) {
  ExperimentConfig config;
  EXPECT_THAT(ApplyConfigText("colour=red\n", config),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("colour")));
  EXPECT_THAT(ApplyConfigText("runs\n", config),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ApplyConfigEntry("n", "many", config),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ApplyConfigFile(TempPath("missing.cfg"), config),
              StatusIs(absl::StatusCode::kNotFound));

  config = ExperimentConfig();
  config.epsilons = {1, -1};
  EXPECT_THAT(config.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  config.epsilons = {1};
  config.runs = 0;
  EXPECT_THAT(config.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  config.runs = 1;
  config.mechanisms = {"pm", "rr"};
  EXPECT_THAT(config.Validate(),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("rr")));
}

TEST(ConfigTest, FileIsRead) {
  const std::string path = TempPath("exp.cfg");
  ASSERT_THAT(WriteFile(path, "d=3\nruns=2\n"), IsOk());
  ExperimentConfig config;
  ASSERT_THAT(ApplyConfigFile(path, config), IsOk());
  EXPECT_EQ(config.d, 3);
  EXPECT_EQ(config.runs, 2);
}

// Parses the long-format variance table into (table, mechanism, eps, d) ->
// value.
std::map<std::string, double> ParseTable(const std::string& csv) {
  std::map<std::string, double> out;
  std::vector<std::string> lines = absl::StrSplit(csv, '\n');
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> f = absl::StrSplit(lines[i], ',');
    EXPECT_EQ(f.size(), 7u) << lines[i];
    double value;
    EXPECT_TRUE(absl::SimpleAtod(f[4], &value));
    out[f[0] + "," + f[1] + "," + f[2] + "," + f[3]] = value;
  }
  return out;
}

TEST(VarianceTableTest, KnownValues) {
  ExperimentConfig config;
  config.task = Task::kVarianceTable;
  const double eps = 2 * std::log(3.0);
  config.epsilons = {eps, 1};
  config.d = 7;
  absl::StatusOr<std::string> csv = RunVarianceTable(config);
  ASSERT_THAT(csv, IsOk());
  EXPECT_THAT(*csv, StartsWith("table,mechanism,epsilon,d,value,runs,seed\n"));
  const std::map<std::string, double> table = ParseTable(*csv);
  const std::string e = FormatDouble(eps);
  EXPECT_NEAR(table.at("worst_case_1d,pm," + e + ",1"), 1.0, 1e-12);
  EXPECT_NEAR(table.at("worst_case_1d,duchi," + e + ",1"), 1.5625, 1e-12);
  EXPECT_NEAR(table.at("worst_case_1d,laplace,1,1"), 8, 1e-12);
  EXPECT_TRUE(table.count("worst_case_1d,staircase,1,1"));
  // d = 7 joins the default dimension grid.
  for (int d : {1, 5, 7, 10, 20, 40}) {
    const std::string key = "1," + std::to_string(d);
    const PrivacyBudget b = *PrivacyBudget::Create(1);
    EXPECT_NEAR(table.at("worst_case_multi,hm," + key),
                WorstCaseVarianceMulti(MultiMechanism::kHybrid, b, d), 1e-9);
    EXPECT_NEAR(table.at("ratio_to_duchi,pm," + key),
                WorstCaseVarianceMulti(MultiMechanism::kPiecewise, b, d) /
                    WorstCaseVarianceMulti(MultiMechanism::kDuchi, b, d),
                1e-12);
  }
  const std::string crossover = FormatDouble(BisectPiecewiseDuchiCrossover());
  EXPECT_NEAR(table.at("crossover,pm=duchi," + crossover + ",1"), 1.29, 0.01);
  EXPECT_NEAR(BisectPiecewiseDuchiCrossover(), PiecewiseDuchiCrossover(),
              1e-9);
}

TEST(VarianceTableTest, DefaultGrid) {
  ExperimentConfig config;
  config.task = Task::kVarianceTable;
  absl::StatusOr<std::string> csv = RunVarianceTable(config);
  ASSERT_THAT(csv, IsOk());
  const std::map<std::string, double> table = ParseTable(*csv);
  EXPECT_TRUE(table.count("worst_case_1d,pm,0.1,1"));
  EXPECT_TRUE(table.count("worst_case_1d,pm,8,1"));
  EXPECT_FALSE(table.count("worst_case_1d,pm,8.1,1"));
}

TEST(MeanFreqTest, NoiselessLimit) {
  ExperimentConfig config;
  config.epsilons = {1000};
  config.mechanisms = {"pm"};
  config.n = 10000;
  config.d = 2;
  config.runs = 3;
  absl::StatusOr<std::vector<MeanFreqRow>> rows = RunMeanFreq(config);
  ASSERT_THAT(rows, IsOk());
  ASSERT_EQ(rows->size(), 1u);
  EXPECT_LT((*rows)[0].mse, 1e-10);
}

TEST(MeanFreqTest, MatchesAnalyticVariance) {
  ExperimentConfig config;
  config.epsilons = {1};
  config.mechanisms = {"pm"};
  config.n = 100000;
  config.d = 16;
  config.distribution = "trunc-gaussian:0.6666666666666666";
  config.runs = 100;
  absl::StatusOr<std::vector<MeanFreqRow>> rows = RunMeanFreq(config);
  ASSERT_THAT(rows, IsOk());
  const double predicted =
      VarianceMulti(MultiMechanism::kPiecewise, 2.0 / 3,
                    *PrivacyBudget::Create(1), 16) /
      1e5;
  EXPECT_GT((*rows)[0].mse, predicted / 2);
  EXPECT_LT((*rows)[0].mse, predicted * 2);
  EXPECT_EQ((*rows)[0].mse, (*rows)[0].mse_numeric);
}

TEST(MeanFreqTest, MechanismOrderingAtUnitBudget) {
  ExperimentConfig config;
  config.epsilons = {1};
  config.mechanisms = {"pm", "duchi", "laplace"};
  config.n = 10000;
  config.d = 16;
  config.distribution = "trunc-gaussian:0.6666666666666666";
  config.runs = 100;
  absl::StatusOr<std::vector<MeanFreqRow>> rows = RunMeanFreq(config);
  ASSERT_THAT(rows, IsOk());
  ASSERT_EQ(rows->size(), 3u);
  const MeanFreqRow& pm = (*rows)[0];
  const MeanFreqRow& duchi = (*rows)[1];
  const MeanFreqRow& laplace = (*rows)[2];
  EXPECT_EQ(pm.mechanism, "pm");
  EXPECT_GT(duchi.mse - pm.mse, 3 * std::hypot(pm.se, duchi.se));
  EXPECT_GT(laplace.mse - duchi.mse, 3 * std::hypot(duchi.se, laplace.se));
}

TEST(MeanFreqTest, CsvCarriesProvenance) {
  ExperimentConfig config;
  config.epsilons = {2};
  config.mechanisms = {"hm", "scdf"};
  config.n = 500;
  config.d = 3;
  config.runs = 2;
  config.seed = 17;
  const std::string csv = MeanFreqCsv(*RunMeanFreq(config));
  std::vector<std::string> lines = absl::StrSplit(csv, '\n');
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0],
            "mechanism,epsilon,mse,se,mse_numeric,se_numeric,mse_categorical,"
            "se_categorical,n,d,runs,seed");
  EXPECT_THAT(lines[1], StartsWith("hm,2,"));
  EXPECT_THAT(lines[1], ::testing::EndsWith(",500,3,2,17"));
  EXPECT_THAT(lines[2], StartsWith("scdf,2,"));
}

TEST(MeanFreqTest, SchemaWithCategoricalAttributes) {
  const std::string schema_path = TempPath("mixed.schema");
  ASSERT_THAT(WriteFile(schema_path,
                        "age,numeric,90\nsex,categorical,2\n"
                        "job,categorical,5\nhours,numeric,60\n"),
              IsOk());
  ExperimentConfig config;
  config.schema_path = schema_path;
  config.epsilons = {2};
  config.mechanisms = {"pm", "laplace"};
  config.n = 20000;
  config.runs = 5;
  absl::StatusOr<std::vector<MeanFreqRow>> rows = RunMeanFreq(config);
  ASSERT_THAT(rows, IsOk());
  for (const MeanFreqRow& row : *rows) {
    EXPECT_EQ(row.d, 4);
    EXPECT_GT(row.mse_categorical, 0);
    EXPECT_GT(row.mse_numeric, 0);
  }
}

TEST(MeanFreqTest, MissingFilesAreNotFound) {
  ExperimentConfig config;
  config.schema_path = TempPath("absent.schema");
  config.runs = 1;
  EXPECT_THAT(RunMeanFreq(config), StatusIs(absl::StatusCode::kNotFound));
}

TEST(DeterminismTest, ByteIdenticalAcrossRunsAndThreadCounts) {
  ExperimentConfig config;
  config.epsilons = {0.5, 2};
  config.n = 3000;
  config.d = 5;
  config.runs = 4;
  config.seed = 5;
  config.threads = 1;
  absl::StatusOr<std::string> first = RunExperiment(config);
  ASSERT_THAT(first, IsOk());
  config.threads = 3;
  EXPECT_EQ(*RunExperiment(config), *first);
  config.seed = 6;
  EXPECT_NE(*RunExperiment(config), *first);

  ExperimentConfig sgd;
  sgd.task = Task::kSgd;
  sgd.epsilons = {4};
  sgd.mechanisms = {"pm", "duchi"};
  sgd.n = 2000;
  sgd.d = 4;
  sgd.runs = 2;
  sgd.folds = 3;
  sgd.threads = 1;
  absl::StatusOr<std::string> a = RunExperiment(sgd);
  ASSERT_THAT(a, IsOk());
  sgd.threads = 2;
  EXPECT_EQ(*RunExperiment(sgd), *a);
}

TEST(SgdHarnessTest, SeparableTask) {
  ExperimentConfig config;
  config.task = Task::kSgd;
  config.epsilons = {4};
  config.mechanisms = {"pm", "duchi"};
  config.n = 20000;
  config.d = 10;
  config.runs = 2;
  absl::StatusOr<std::vector<SgdRow>> rows = RunSgd(config);
  ASSERT_THAT(rows, IsOk());
  ASSERT_EQ(rows->size(), 3u);
  const SgdRow& pm = (*rows)[0];
  const SgdRow& duchi = (*rows)[1];
  const SgdRow& baseline = (*rows)[2];
  EXPECT_EQ(baseline.mechanism, "none");
  EXPECT_LE(baseline.metric_mean, 0.02);
  EXPECT_LE(pm.metric_mean,
            duchi.metric_mean + 2 * std::hypot(pm.metric_sd, duchi.metric_sd));
  EXPECT_EQ(pm.group_size, 2);
  EXPECT_EQ(pm.loss, "logistic");
  EXPECT_THAT(SgdCsv(*rows),
              StartsWith("mechanism,epsilon,loss,metric_mean,metric_sd,"
                         "group_size,n,d,runs,seed\npm,4,logistic,"));
}

TEST(SampleTest, WritesDataSchemaFoldsAndReports) {
  const std::string out = TempPath("sample.csv");
  ExperimentConfig config;
  config.task = Task::kSample;
  config.n = 300;
  config.d = 3;
  config.folds = 4;
  config.mechanisms = {"hm"};
  config.epsilons = {2};
  ASSERT_THAT(RunSample(config), StatusIs(absl::StatusCode::kInvalidArgument));
  config.out_path = out;
  ASSERT_THAT(RunSample(config), IsOk());
  absl::StatusOr<Schema> schema = Schema::Load(out + ".schema");
  ASSERT_THAT(schema, IsOk());
  EXPECT_EQ(schema->dimension(), 3);
  absl::StatusOr<Dataset> data = Dataset::ReadCsv(*schema, out);
  ASSERT_THAT(data, IsOk());
  EXPECT_EQ(data->size(), 300);
  const std::vector<std::string> folds =
      absl::StrSplit(ReadAll(out + ".folds"), '\n', absl::SkipEmpty());
  EXPECT_EQ(folds.size(), 4u);
  absl::StatusOr<std::vector<Report>> reports =
      ParseReports(ReadAll(out + ".reports"), *schema);
  ASSERT_THAT(reports, IsOk());
  EXPECT_EQ(reports->size(), 300u);

  // The sampled file round-trips through the mean-freq data path.
  ExperimentConfig rerun;
  rerun.schema_path = out + ".schema";
  rerun.data_path = out;
  rerun.epsilons = {2};
  rerun.mechanisms = {"pm"};
  rerun.runs = 2;
  absl::StatusOr<std::vector<MeanFreqRow>> rows = RunMeanFreq(rerun);
  ASSERT_THAT(rows, IsOk());
  EXPECT_EQ((*rows)[0].n, 300);

  config.mechanisms = {"duchi"};
  EXPECT_THAT(RunSample(config), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(WriteFileTest, UnwritablePathIsUnavailable) {
  EXPECT_THAT(WriteFile("/nonexistent-dir/x.csv", "a"),
              StatusIs(absl::StatusCode::kUnavailable));
}

}  // namespace
}  // namespace ldp
