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

// Aggregator-side estimation of attribute means and value frequencies, plus
// analytic per-coordinate variances of the multidimensional mechanisms.

#ifndef LDP_AGGREGATE_H_
#define LDP_AGGREGATE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldp/exact_sum.h"
#include "ldp/multidim.h"
#include "ldp/schema.h"

namespace ldp {

struct AggregatorOptions {
  // Probability that a given attribute appears in one user's report: k/d for
  // sampled collection, 1 when every attribute is reported.
  double report_probability = 1;
  // Budget at which each categorical attribute was OUE-perturbed.
  PrivacyBudget categorical_budget;
  // Divide the debiased count by the number of reporters m instead of
  // n * report_probability. Lower variance, same expectation.
  bool fraction_of_reporters = false;
};

struct AttributeEstimate {
  int attribute = 0;
  bool categorical = false;
  // Numeric: mean on the normalized scale and its predicted standard error.
  double mean = 0;
  double mean_sd = 0;
  // Categorical: entry v - 1 is for value v. `frequencies` is unbiased and
  // may leave [0, 1]; `normalized` is clamped to [0, 1] and sums to 1.
  std::vector<double> frequencies;
  std::vector<double> frequency_sd;
  std::vector<double> normalized;
  // False when no user reported this attribute.
  bool covered = true;
};

struct EstimateSet {
  int64_t n = 0;
  std::vector<AttributeEstimate> attributes;
};

// CSV with header attribute,kind,value_or_mean,estimate,predicted_sd. Numeric
// rows carry "mean" and raw-scale values; categorical rows carry the value and
// its unnormalized frequency.
std::string EstimatesToCsv(const EstimateSet& estimates, const Schema& schema);

// Mergeable accumulation state. Sums are exact, so any split of the reports
// into shards merged in any order yields bit-identical estimates.
class Aggregator {
 public:
  Aggregator(const Schema& schema, AggregatorOptions options);

  // Reports from RecordPerturber at `budget`.
  static Aggregator ForSampling(const Schema& schema, PrivacyBudget budget);
  // Reports carrying every attribute, categorical ones at budget eps / d.
  static Aggregator ForSplit(const Schema& schema, PrivacyBudget budget);

  absl::Status Add(const Report& report);
  // Unchecked fast path: count one user, then add that user's entries.
  void AddUser() { ++n_; }
  void AddNumeric(int attribute, double value);
  void AddCategorical(int attribute, const std::vector<uint8_t>& bits);

  absl::Status Merge(const Aggregator& other);

  int64_t n() const { return n_; }
  // Number of reports that carried `attribute`.
  int64_t reporters(int attribute) const { return state_[attribute].m; }

  // Mean of attribute j on the normalized scale.
  absl::StatusOr<double> MeanEstimate(int attribute) const;
  // Frequency of value v (1-based). Returns 0 when no user reported the
  // attribute.
  absl::StatusOr<double> FreqEstimate(int attribute, int value) const;
  absl::StatusOr<EstimateSet> Estimates() const;

 private:
  struct AttributeState {
    int64_t m = 0;
    ExactSum sum;
    ExactSum sum_squares;
    std::vector<int64_t> ones;
  };

  double FrequencyScale(int attribute) const;
  double FrequencySd(int attribute, double estimate) const;

  const Schema* schema_;
  AggregatorOptions options_;
  double oue_p_;
  double oue_q_;
  int64_t n_ = 0;
  std::vector<AttributeState> state_;
};

// sqrt(d ln(d / beta)) / (eps sqrt(n)): the error scale of sampled mean
// estimation with constant 1. A scale, not a certified bound.
double ErrorScale(int d, int64_t n, PrivacyBudget budget, double beta);

enum class MultiMechanism { kDuchi, kPiecewise, kHybrid };

absl::string_view MultiMechanismName(MultiMechanism mechanism);

// Exact variance of one output coordinate with input t. Piecewise and Hybrid
// use attribute sampling with k = KOf(budget, d).
double VarianceMulti(MultiMechanism mechanism, double t, PrivacyBudget budget,
                     int d);
// max over t in [-1, 1], attained at t = 0 or |t| = 1.
double WorstCaseVarianceMulti(MultiMechanism mechanism, PrivacyBudget budget,
                              int d);

struct WorstCaseComparison {
  struct Entry {
    MultiMechanism mechanism;
    double variance;
  };
  std::vector<Entry> ascending;

  // E.g. "hm < pm < duchi" or "hm = duchi < pm"; values within
  // `relative_tolerance` of each other are joined by "=".
  std::string Ordering(double relative_tolerance = 1e-9) const;
};

WorstCaseComparison CompareWorstCase(PrivacyBudget budget, int d);

}  // namespace ldp

#endif  // LDP_AGGREGATE_H_
