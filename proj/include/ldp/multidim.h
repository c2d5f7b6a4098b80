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

// Multidimensional collection: Duchi's d-dimensional mechanism, attribute
// sampling with a one-dimensional base mechanism, OUE for categorical values,
// and mixed numeric/categorical user reports.

#ifndef LDP_MULTIDIM_H_
#define LDP_MULTIDIM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldp/mechanisms.h"
#include "ldp/random.h"
#include "ldp/schema.h"

namespace ldp {

// Number of attributes each user reports: max(1, min(d, floor(eps / 2.5))).
int KOf(PrivacyBudget budget, int d);

// Constant C_d of Duchi's mechanism; C_1 = 1.
double DuchiMultiConstant(int d);

struct DuchiMultiParams {
  double cd;
  double b;  // Output magnitude on every coordinate.
  static DuchiMultiParams For(PrivacyBudget budget, int d);
};

// Output lies in {-B, B}^d. Corners on the chosen side of the sampled vertex
// are drawn uniformly by rejection; a corner orthogonal to the vertex (even d
// only) counts as a member of both sides.
std::vector<double> DuchiMulti(std::span<const double> t, PrivacyBudget budget,
                               RandomSource& rng);

// Base mechanisms usable for sampled collection.
enum class NumericBase { kPiecewise, kHybrid };

struct SamplingPlan {
  int k;
  std::vector<int> indices;  // k distinct 0-based attribute indices.

  static SamplingPlan Draw(int d, int k, RandomSource& rng);
};

// Dense vector with k nonzero coordinates (d/k) * x_j, where x_j is the base
// mechanism's output at budget eps / k. Unsampled coordinates are 0.
std::vector<double> PerturbNumericMulti(std::span<const double> t,
                                        PrivacyBudget budget, NumericBase base,
                                        RandomSource& rng);

struct OueParams {
  double p;  // Probability a true 1-bit stays 1.
  double q;  // Probability a 0-bit flips to 1.
  static OueParams For(PrivacyBudget budget);
};

// `value` is in 1..k_vals. Returns k_vals bits, each 0 or 1.
std::vector<uint8_t> OuePerturb(int value, int k_vals, PrivacyBudget budget,
                                RandomSource& rng);
// Same draw sequence as OuePerturb, writing into a reusable buffer.
void OuePerturbInto(int value, int k_vals, const OueParams& params,
                    RandomSource& rng, std::vector<uint8_t>& bits);

struct ReportEntry {
  int attribute = 0;  // 0-based schema index.
  bool categorical = false;
  double numeric = 0;         // Normalized scale, already multiplied by d/k.
  std::vector<uint8_t> bits;  // OUE output; categorical entries only.
};

struct Report {
  int64_t user_id = 0;
  std::vector<ReportEntry> entries;
};

// Perturbs whole records at one budget: k attributes sampled per user, each
// numeric one through the base mechanism and each categorical one through OUE,
// all at budget eps / k. Reuses its precomputed constants across users.
class RecordPerturber {
 public:
  RecordPerturber(const Schema& schema, PrivacyBudget budget,
                  NumericBase base);

  int k() const { return k_; }
  PrivacyBudget attribute_budget() const { return attribute_budget_; }

  // `values` holds raw attribute values. `report` is overwritten; its buffers
  // are reused.
  absl::Status Perturb(int64_t user_id, std::span<const double> values,
                       RandomSource& rng, Report& report) const;

 private:
  const Schema* schema_;
  int k_;
  PrivacyBudget attribute_budget_;
  Perturber1d numeric_;
  OueParams oue_;
};

absl::StatusOr<Report> PerturbRecord(int64_t user_id,
                                     std::span<const double> values,
                                     const Schema& schema, PrivacyBudget budget,
                                     NumericBase base, RandomSource& rng);

// One line per entry, attribute indices 1-based:
//   user_id,attr_index,N,<value>
//   user_id,attr_index,C,<bitstring>
// Numeric values are written on the normalized scale.
std::string SerializeReports(std::span<const Report> reports);
// Consecutive lines sharing a user id form one report.
absl::StatusOr<std::vector<Report>> ParseReports(absl::string_view text,
                                                 const Schema& schema);

}  // namespace ldp

#endif  // LDP_MULTIDIM_H_
