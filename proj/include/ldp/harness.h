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

// Experiment driver: mean/frequency MSE sweeps, analytic variance tables,
// cross-validated LDP-SGD benchmarks and synthetic sample export. Every
// result is a CSV string that depends only on the configuration.

#ifndef LDP_HARNESS_H_
#define LDP_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace ldp {

enum class Task { kMeanFreq, kSgd, kVarianceTable, kSample };

struct ExperimentConfig {
  Task task = Task::kMeanFreq;
  // Empty lists select the task's defaults: eps = 1 (0.1..8 for the
  // variance table) and every mechanism the task supports.
  std::vector<double> epsilons;
  std::vector<std::string> mechanisms;
  int64_t n = 100000;
  int d = 16;
  std::string schema_path;
  std::string data_path;
  std::string distribution = "uniform";
  int runs = 100;
  uint64_t seed = 1;
  std::string out_path;
  // Learning tasks.
  std::string loss = "logistic";
  double lambda = 1e-4;
  int group_size = 0;  // 0 selects the default for (d, eps).
  double lr_const = 1;
  std::string label;
  int folds = 10;
  // Worker threads for independent runs; 0 uses the hardware count. Results
  // do not depend on it.
  int threads = 0;

  absl::Status Validate() const;
};

// Sets one option from its textual form. Keys match the CLI flag names
// without dashes: epsilon, mechanism, n, d, schema, data, dist, runs, seed,
// out, loss, lambda, group-size, lr-const, label, folds, threads. Lists are
// comma-separated.
absl::Status ApplyConfigEntry(absl::string_view key, absl::string_view value,
                              ExperimentConfig& config);
// key=value lines; blank lines and '#' comments are skipped.
absl::Status ApplyConfigText(absl::string_view text, ExperimentConfig& config);
absl::Status ApplyConfigFile(const std::string& path, ExperimentConfig& config);

struct MeanFreqRow {
  std::string mechanism;
  double epsilon = 0;
  // Averages over runs of the squared error per estimated quantity, with the
  // standard error of that average across runs.
  double mse = 0;
  double se = 0;
  double mse_numeric = 0;
  double se_numeric = 0;
  double mse_categorical = 0;
  double se_categorical = 0;
  int64_t n = 0;
  int d = 0;
  int runs = 0;
  uint64_t seed = 0;
};

// Mechanisms: pm and hm collect whole records with attribute sampling; duchi,
// laplace, scdf and staircase split the budget, giving numeric attributes
// d_n eps / d in total and every categorical attribute eps / d through OUE.
absl::StatusOr<std::vector<MeanFreqRow>> RunMeanFreq(
    const ExperimentConfig& config);
std::string MeanFreqCsv(const std::vector<MeanFreqRow>& rows);

// Long-format CSV table,mechanism,epsilon,d,value,runs,seed with tables
// worst_case_1d, worst_case_multi, ratio_to_duchi and crossover.
absl::StatusOr<std::string> RunVarianceTable(const ExperimentConfig& config);

// Budget where worst-case Piecewise and Duchi variances meet, by bisection.
double BisectPiecewiseDuchiCrossover();

struct SgdRow {
  std::string mechanism;
  double epsilon = 0;
  std::string loss;
  // Test MSE for linear loss, misclassification rate otherwise; mean and
  // standard deviation over every (run, fold) pair.
  double metric_mean = 0;
  double metric_sd = 0;
  int group_size = 0;
  int64_t n = 0;
  int d = 0;
  int runs = 0;
  uint64_t seed = 0;
};

// Uses `data_path` + `schema_path` + `label` when given, otherwise a
// synthetic linearly separable task with n rows and d features. The
// non-private baseline ("none") is always included.
absl::StatusOr<std::vector<SgdRow>> RunSgd(const ExperimentConfig& config);
std::string SgdCsv(const std::vector<SgdRow>& rows);

// Writes the dataset to out_path, its schema to <out>.schema and
// cross-validation folds to <out>.folds. With exactly one mechanism (pm or
// hm) and one budget, also writes perturbed reports to <out>.reports.
absl::Status RunSample(const ExperimentConfig& config);

// Runs the configured task and writes its CSV to out_path, or returns it
// when out_path is empty.
absl::StatusOr<std::string> RunExperiment(const ExperimentConfig& config);

// Writes `contents` to `path`; errors carry the path.
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace ldp

#endif  // LDP_HARNESS_H_
