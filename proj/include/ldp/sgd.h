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

// Stochastic gradient descent for regularized empirical risk minimization in
// which every gradient leaves its user only after local perturbation.

#ifndef LDP_SGD_H_
#define LDP_SGD_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldp/random.h"
#include "ldp/schema.h"

namespace ldp {

enum class LossKind { kLinear, kLogistic, kSvm };

absl::StatusOr<LossKind> ParseLossKind(absl::string_view name);
absl::string_view LossKindName(LossKind kind);

// How a user privatizes a clipped gradient.
enum class GradientMechanism {
  kPiecewise,     // Attribute sampling with the Piecewise base.
  kHybrid,        // Attribute sampling with the Hybrid base.
  kDuchi,         // Duchi's d-dimensional mechanism.
  kLaplaceSplit,  // Laplace on every coordinate at eps / d.
  kNonPrivate,    // Identity; clipping is still applied.
};

// Accepts "pm", "hm", "duchi", "laplace", "none".
absl::StatusOr<GradientMechanism> ParseGradientMechanism(
    absl::string_view name);
absl::string_view GradientMechanismName(GradientMechanism mechanism);

// ceil(d ln(max(d, 2)) / eps^2).
int DefaultGroupSize(int d, double epsilon);

struct SgdConfig {
  LossKind loss = LossKind::kLogistic;
  double lambda = 1e-4;
  // 0 selects DefaultGroupSize.
  int group_size = 0;
  // Learning rate at iteration t (1-based) is lr_const / sqrt(t).
  double lr_const = 1;
  double epsilon = 1;
  GradientMechanism mechanism = GradientMechanism::kPiecewise;
  // Iterations between training-log rows.
  int log_interval = 1;

  absl::Status Validate() const;
};

// Row-major features in [-1, 1]^d with one label per row.
struct LabeledData {
  int d = 0;
  std::vector<double> features;
  std::vector<double> labels;

  int64_t size() const { return static_cast<int64_t>(labels.size()); }
  std::span<const double> Row(int64_t i) const {
    return {features.data() + i * d, static_cast<size_t>(d)};
  }
  void Append(std::span<const double> x, double y);
  LabeledData Subset(std::span<const int64_t> rows) const;
};

// Linear labels lie in [-1, 1]; classification labels are -1 or +1.
absl::Status ValidateLabel(LossKind kind, double y);

// Regularized loss l(beta; x, y) + (lambda / 2) ||beta||^2.
absl::StatusOr<double> Loss(LossKind kind, std::span<const double> beta,
                            std::span<const double> x, double y,
                            double lambda);
// Gradient of Loss in beta. The hinge subgradient at margin exactly 1 is 0.
absl::StatusOr<std::vector<double>> Gradient(LossKind kind,
                                             std::span<const double> beta,
                                             std::span<const double> x,
                                             double y, double lambda);

std::vector<double> ClipGradient(std::span<const double> g);

// One user's privatized report of a clipped gradient at the full budget.
// Unbiased for `clipped`.
std::vector<double> PerturbGradient(std::span<const double> clipped,
                                    PrivacyBudget budget,
                                    GradientMechanism mechanism,
                                    RandomSource& rng);

struct IterationRecord {
  int64_t t = 0;
  double gamma = 0;
  // Mean regularized loss on the holdout set; NaN without one.
  double holdout_loss = 0;
  // L2 norm of the averaged noisy gradient.
  double grad_norm = 0;
};

struct TrainResult {
  std::vector<double> beta;
  std::vector<IterationRecord> log;
  // Row indices in the order their gradients were perturbed. Each appears at
  // most once.
  std::vector<int64_t> participants;
};

// Users are shuffled with `rng` and cut into floor(n / |G|) disjoint groups;
// the remainder is left out. Group t updates beta once. beta starts at 0.
absl::StatusOr<TrainResult> Train(const LabeledData& data,
                                  const SgdConfig& config, RandomSource& rng,
                                  const LabeledData* holdout = nullptr);

// Mean squared error for kLinear, otherwise the misclassification rate with
// sign(0) = +1.
absl::StatusOr<double> Evaluate(std::span<const double> beta,
                                const LabeledData& data, LossKind kind);
// Mean regularized loss over `data`.
absl::StatusOr<double> MeanLoss(std::span<const double> beta,
                                const LabeledData& data, LossKind kind,
                                double lambda);

// Header t,gamma,metric_on_holdout,grad_norm_estimate.
std::string TrainingLogCsv(const TrainResult& result);
// Header coordinate,beta.
std::string ModelCsv(std::span<const double> beta);

}  // namespace ldp

#endif  // LDP_SGD_H_
