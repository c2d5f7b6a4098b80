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


// Command-line experiment driver.
//
//   ldp mean-freq      MSE of mean and frequency estimates per mechanism
//   ldp sgd            cross-validated LDP-SGD benchmark
//   ldp variance-table analytic worst-case variances and ratios
//   ldp sample         synthetic dataset, schema, folds and reports
//
// Exit status: 0 on success, 1 on configuration errors, 2 on I/O errors.

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "ldp/harness.h"

namespace {

constexpr int kConfigError = 1;
constexpr int kIoError = 2;

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
      return kIoError;
    default:
      return kConfigError;
  }
}

struct Subcommand {
  ldp::Task task;
  CLI::App* app;
  std::string config_path;
  // Flag name to raw value, in declaration order.
  std::vector<std::pair<std::string, std::string>> values;
};

void AddFlag(Subcommand& sub, const std::string& name,
             const std::string& help) {
  sub.values.emplace_back(name, "");
  sub.app->add_option("--" + name, sub.values.back().second, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local differential privacy experiments"};
  app.require_subcommand(1);

  std::vector<Subcommand> subs;
  subs.reserve(4);
  const std::pair<ldp::Task, const char*> specs[] = {
      {ldp::Task::kMeanFreq, "mean-freq"},
      {ldp::Task::kSgd, "sgd"},
      {ldp::Task::kVarianceTable, "variance-table"},
      {ldp::Task::kSample, "sample"}};
  const char* descriptions[] = {
      "Mean and frequency estimation error per mechanism",
      "Cross-validated private stochastic gradient descent",
      "Analytic worst-case variance tables",
      "Write a synthetic dataset, its schema, folds and optional reports"};
  for (int i = 0; i < 4; ++i) {
    Subcommand sub{specs[i].first, app.add_subcommand(specs[i].second,
                                                      descriptions[i]),
                   "", {}};
    sub.values.reserve(20);
    subs.push_back(std::move(sub));
    Subcommand& s = subs.back();
    s.app->add_option("--config", s.config_path,
                      "key=value file; flags take precedence");
    AddFlag(s, "epsilon", "Comma-separated privacy budgets");
    AddFlag(s, "mechanism", "Comma-separated mechanisms");
    AddFlag(s, "n", "Number of users");
    AddFlag(s, "d", "Number of synthetic attributes");
    AddFlag(s, "schema", "Schema file");
    AddFlag(s, "dist",
            "trunc-gaussian:<mu> | uniform | power-law[:<exponent>]");
    AddFlag(s, "data", "Dataset CSV (requires --schema)");
    AddFlag(s, "runs", "Repetitions");
    AddFlag(s, "seed", "Random seed");
    AddFlag(s, "out", "Output path (stdout when omitted)");
    AddFlag(s, "threads", "Worker threads (0 = all cores)");
    if (s.task == ldp::Task::kSgd || s.task == ldp::Task::kSample) {
      AddFlag(s, "folds", "Cross-validation folds");
    }
    if (s.task == ldp::Task::kSgd) {
      AddFlag(s, "loss", "linear | logistic | svm");
      AddFlag(s, "lambda", "L2 regularization");
      AddFlag(s, "group-size", "Users per iteration (0 = default)");
      AddFlag(s, "lr-const", "Learning rate constant c in c / sqrt(t)");
      AddFlag(s, "label", "Label column for dataset input");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  for (Subcommand& sub : subs) {
    if (!sub.app->parsed()) continue;
    ldp::ExperimentConfig config;
    config.task = sub.task;
    if (sub.task == ldp::Task::kSgd) config.runs = 5;
    if (!sub.config_path.empty()) {
      if (absl::Status s = ldp::ApplyConfigFile(sub.config_path, config);
          !s.ok()) {
        std::cerr << "error: " << s.message() << "\n";
        return ExitCode(s);
      }
    }
    for (const auto& [name, value] : sub.values) {
      if (sub.app->get_option("--" + name)->count() == 0) continue;
      if (absl::Status s = ldp::ApplyConfigEntry(name, value, config);
          !s.ok()) {
        std::cerr << "error: " << s.message() << "\n";
        return ExitCode(s);
      }
    }
    absl::StatusOr<std::string> csv = ldp::RunExperiment(config);
    if (!csv.ok()) {
      std::cerr << "error: " << csv.status().message() << "\n";
      return ExitCode(csv.status());
    }
    if (config.out_path.empty()) std::cout << *csv;
    return 0;
  }
  return kConfigError;
}
