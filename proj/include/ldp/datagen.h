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

// Synthetic datasets, categorical one-hot encoding, label construction and
// cross-validation folds.

#ifndef LDP_DATAGEN_H_
#define LDP_DATAGEN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldp/random.h"
#include "ldp/schema.h"
#include "ldp/sgd.h"

namespace ldp {

enum class Distribution { kTruncGaussian, kUniform, kPowerLaw };

struct SyntheticSpec {
  Distribution distribution = Distribution::kUniform;
  double mu = 0;          // Truncated Gaussian only.
  double sigma = 0.25;    // Truncated Gaussian only.
  double exponent = 10;   // Power law density is proportional to (x+2)^-a.
  int d = 1;
  int64_t n = 1;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

// Parses "trunc-gaussian:<mu>", "uniform", "power-law" or
// "power-law:<exponent>" into the distribution fields of `spec`.
absl::Status ParseDistribution(absl::string_view text, SyntheticSpec& spec);

// Probability that Normal(mu, sigma) lands in [-1, 1].
double TruncGaussianAcceptance(double mu, double sigma);

// One draw in [-1, 1].
double SampleValue(const SyntheticSpec& spec, RandomSource& rng);

// n tuples over d numeric attributes x1..xd with range 1. Row i depends only
// on (seed, i).
absl::StatusOr<Dataset> Generate(const SyntheticSpec& spec);

// n tuples for an arbitrary schema: numeric attributes follow `spec`'s
// distribution scaled to their range, categorical value v has probability
// proportional to 1 / v.
absl::StatusOr<Dataset> GenerateForSchema(const Schema& schema,
                                          const SyntheticSpec& spec);

// Numeric attributes count 1, a categorical one with k values counts k - 1.
int EncodedWidth(const Schema& schema);

// Numeric values are normalized; categorical value l < k sets indicator l,
// value k sets none.
std::vector<double> OneHotEncode(std::span<const double> values,
                                 const Schema& schema);

// +1 where the value exceeds the column mean, -1 elsewhere.
std::vector<double> BinarizeLabel(std::span<const double> column);

// Builds a learning task from a dataset: `label` is taken out of the
// features, the rest is one-hot encoded. Linear labels are normalized;
// classification labels are binarized around the mean.
absl::StatusOr<LabeledData> MakeLabeledData(const Dataset& dataset,
                                            absl::string_view label,
                                            LossKind kind);

// Uniform features in [-1, 1]^d, a hidden direction w with ||w||_1 = 1, and
// points with |w.x| < margin discarded. Classification labels are sign(w.x);
// linear labels are w.x itself.
LabeledData GenerateSeparableTask(int d, int64_t n, LossKind kind,
                                  double margin, RandomSource& rng);

// Random partition of 0..n-1 into `folds` index lists of near-equal size.
std::vector<std::vector<int64_t>> CrossValidationFolds(int64_t n, int folds,
                                                       RandomSource& rng);
// One line per fold: space-separated row indices.
std::string FoldsToText(const std::vector<std::vector<int64_t>>& folds);

}  // namespace ldp

#endif  // LDP_DATAGEN_H_
