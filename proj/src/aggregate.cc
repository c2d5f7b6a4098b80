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


#include "ldp/aggregate.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ldp/mechanisms.h"

namespace ldp {

Aggregator::Aggregator(const Schema& schema, AggregatorOptions options)
    : schema_(&schema),
      options_(options),
      state_(schema.dimension()) {
  const OueParams oue = OueParams::For(options.categorical_budget);
  oue_p_ = oue.p;
  oue_q_ = oue.q;
  for (int j = 0; j < schema.dimension(); ++j) {
    if (schema.attribute(j).is_categorical()) {
      state_[j].ones.assign(schema.attribute(j).cardinality, 0);
    }
  }
}

Aggregator Aggregator::ForSampling(const Schema& schema, PrivacyBudget budget) {
  const int d = schema.dimension();
  const int k = KOf(budget, d);
  return Aggregator(schema, {static_cast<double>(k) / d,
                             budget.Scaled(1.0 / k), false});
}

Aggregator Aggregator::ForSplit(const Schema& schema, PrivacyBudget budget) {
  return Aggregator(schema,
                    {1.0, budget.Scaled(1.0 / schema.dimension()), false});
}

absl::Status Aggregator::Add(const Report& report) {
  for (const ReportEntry& entry : report.entries) {
    if (entry.attribute < 0 || entry.attribute >= schema_->dimension()) {
      return absl::InvalidArgumentError(
          absl::StrCat("User ", report.user_id, ": attribute index ",
                       entry.attribute, " out of range"));
    }
    const AttributeSpec& spec = schema_->attribute(entry.attribute);
    if (entry.categorical != spec.is_categorical() ||
        (entry.categorical &&
         static_cast<int>(entry.bits.size()) != spec.cardinality)) {
      return absl::InvalidArgumentError(
          absl::StrCat("User ", report.user_id, ": payload for '", spec.name,
                       "' does not match the schema"));
    }
  }
  AddUser();
  for (const ReportEntry& entry : report.entries) {
    if (entry.categorical) {
      AddCategorical(entry.attribute, entry.bits);
    } else {
      AddNumeric(entry.attribute, entry.numeric);
    }
  }
  return absl::OkStatus();
}

void Aggregator::AddNumeric(int attribute, double value) {
  AttributeState& state = state_[attribute];
  ++state.m;
  state.sum.Add(value);
  state.sum_squares.Add(value * value);
}

void Aggregator::AddCategorical(int attribute,
                                const std::vector<uint8_t>& bits) {
  AttributeState& state = state_[attribute];
  ++state.m;
  for (size_t v = 0; v < bits.size(); ++v) state.ones[v] += bits[v];
}

absl::Status Aggregator::Merge(const Aggregator& other) {
  if (other.state_.size() != state_.size() ||
      other.options_.report_probability != options_.report_probability ||
      other.options_.categorical_budget.epsilon() !=
          options_.categorical_budget.epsilon() ||
      other.options_.fraction_of_reporters != options_.fraction_of_reporters) {
    return absl::InvalidArgumentError(
        "Cannot merge aggregators with different configurations");
  }
  n_ += other.n_;
  for (size_t j = 0; j < state_.size(); ++j) {
    state_[j].m += other.state_[j].m;
    state_[j].sum.Merge(other.state_[j].sum);
    state_[j].sum_squares.Merge(other.state_[j].sum_squares);
    for (size_t v = 0; v < state_[j].ones.size(); ++v) {
      state_[j].ones[v] += other.state_[j].ones[v];
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Aggregator::MeanEstimate(int attribute) const {
  if (attribute < 0 || attribute >= schema_->dimension() ||
      !schema_->attribute(attribute).is_numeric()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Attribute ", attribute, " is not numeric"));
  }
  if (n_ == 0) return absl::FailedPreconditionError("No reports");
  return state_[attribute].sum.Value() / static_cast<double>(n_);
}

// Multiplier turning a debiased count into a frequency.
double Aggregator::FrequencyScale(int attribute) const {
  if (options_.fraction_of_reporters) {
    return 1.0 / static_cast<double>(state_[attribute].m);
  }
  return 1.0 / (options_.report_probability * static_cast<double>(n_));
}

absl::StatusOr<double> Aggregator::FreqEstimate(int attribute,
                                                int value) const {
  if (attribute < 0 || attribute >= schema_->dimension() ||
      !schema_->attribute(attribute).is_categorical()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Attribute ", attribute, " is not categorical"));
  }
  if (value < 1 || value > schema_->attribute(attribute).cardinality) {
    return absl::InvalidArgumentError(
        absl::StrCat("Value ", value, " outside 1..",
                     schema_->attribute(attribute).cardinality));
  }
  if (n_ == 0) return absl::FailedPreconditionError("No reports");
  const AttributeState& state = state_[attribute];
  if (state.m == 0) return 0.0;
  const double debiased =
      (static_cast<double>(state.ones[value - 1]) -
       static_cast<double>(state.m) * oue_q_) /
      (oue_p_ - oue_q_);
  return debiased * FrequencyScale(attribute);
}

// Standard deviation over the perturbation and attribute sampling for a fixed
// population in which a fraction f holds the value; f is the clamped estimate.
double Aggregator::FrequencySd(int attribute, double estimate) const {
  const double f = std::clamp(estimate, 0.0, 1.0);
  const double p = oue_p_;
  const double q = oue_q_;
  const double gap = p - q;
  // Within-user Bernoulli noise of one reported bit, averaged over users.
  const double bit_variance = f * p * (1 - p) + (1 - f) * q * (1 - q);
  const double rho = options_.report_probability;
  if (options_.fraction_of_reporters) {
    const double m = static_cast<double>(state_[attribute].m);
    // Reporters form a random subset of size m out of about m / rho users.
    return std::sqrt((bit_variance / (gap * gap) + (1 - rho) * f * (1 - f)) /
                     m);
  }
  // Each user contributes S (b - q) / (rho (p - q)) with S ~ Bernoulli(rho).
  const double n = static_cast<double>(n_);
  const double second_moment =
      (f * (p * (1 - 2 * q) + q * q) + (1 - f) * (q * (1 - 2 * q) + q * q)) /
      (rho * gap * gap);
  return std::sqrt(std::max(second_moment - f, 0.0) / n);
}

absl::StatusOr<EstimateSet> Aggregator::Estimates() const {
  if (n_ == 0) return absl::FailedPreconditionError("No reports");
  EstimateSet out;
  out.n = n_;
  const double n = static_cast<double>(n_);
  for (int j = 0; j < schema_->dimension(); ++j) {
    const AttributeState& state = state_[j];
    AttributeEstimate estimate;
    estimate.attribute = j;
    estimate.covered = state.m > 0;
    if (schema_->attribute(j).is_numeric()) {
      estimate.mean = state.sum.Value() / n;
      const double second = state.sum_squares.Value() / n;
      estimate.mean_sd = std::sqrt(
          std::max(second - estimate.mean * estimate.mean, 0.0) / n);
    } else {
      estimate.categorical = true;
      const int k_vals = schema_->attribute(j).cardinality;
      double clamped_total = 0;
      for (int v = 1; v <= k_vals; ++v) {
        const double f = *FreqEstimate(j, v);
        estimate.frequencies.push_back(f);
        estimate.frequency_sd.push_back(
            estimate.covered ? FrequencySd(j, f) : 0.0);
        estimate.normalized.push_back(std::clamp(f, 0.0, 1.0));
        clamped_total += estimate.normalized.back();
      }
      for (double& f : estimate.normalized) {
        f = clamped_total > 0 ? f / clamped_total : 1.0 / k_vals;
      }
    }
    out.attributes.push_back(std::move(estimate));
  }
  return out;
}

std::string EstimatesToCsv(const EstimateSet& estimates, const Schema& schema) {
  std::string out = "attribute,kind,value_or_mean,estimate,predicted_sd\n";
  for (const AttributeEstimate& e : estimates.attributes) {
    const AttributeSpec& spec = schema.attribute(e.attribute);
    if (!e.categorical) {
      absl::StrAppend(&out, spec.name, ",numeric,mean,",
                      FormatDouble(Denormalize(e.mean, spec)), ",",
                      FormatDouble(Denormalize(e.mean_sd, spec)), "\n");
      continue;
    }
    for (size_t v = 0; v < e.frequencies.size(); ++v) {
      absl::StrAppend(&out, spec.name, ",categorical,", v + 1, ",",
                      FormatDouble(e.frequencies[v]), ",",
                      FormatDouble(e.frequency_sd[v]), "\n");
    }
  }
  return out;
}

double ErrorScale(int d, int64_t n, PrivacyBudget budget, double beta) {
  return std::sqrt(d * std::log(d / beta)) /
         (budget.epsilon() * std::sqrt(static_cast<double>(n)));
}

absl::string_view MultiMechanismName(MultiMechanism mechanism) {
  switch (mechanism) {
    case MultiMechanism::kDuchi:
      return "duchi";
    case MultiMechanism::kPiecewise:
      return "pm";
    case MultiMechanism::kHybrid:
      return "hm";
  }
  return "unknown";
}

double VarianceMulti(MultiMechanism mechanism, double t, PrivacyBudget budget,
                     int d) {
  if (mechanism == MultiMechanism::kDuchi) {
    const double b = DuchiMultiParams::For(budget, d).b;
    return b * b - t * t;
  }
  // A coordinate is (d/k) x with probability k/d and 0 otherwise, so
  // E[out^2] = (d/k) E[x^2] = (d/k) (Var x + t^2).
  const int k = KOf(budget, d);
  const double ratio = static_cast<double>(d) / k;
  const Mechanism1d base = mechanism == MultiMechanism::kPiecewise
                               ? Mechanism1d::kPiecewise
                               : Mechanism1d::kHybrid;
  return ratio * (Variance1d(base, t, budget.Scaled(1.0 / k)) + t * t) -
         t * t;
}

double WorstCaseVarianceMulti(MultiMechanism mechanism, PrivacyBudget budget,
                              int d) {
  return std::max(VarianceMulti(mechanism, 0, budget, d),
                  VarianceMulti(mechanism, 1, budget, d));
}

WorstCaseComparison CompareWorstCase(PrivacyBudget budget, int d) {
  WorstCaseComparison out;
  for (MultiMechanism m : {MultiMechanism::kDuchi, MultiMechanism::kPiecewise,
                           MultiMechanism::kHybrid}) {
    out.ascending.push_back({m, WorstCaseVarianceMulti(m, budget, d)});
  }
  std::stable_sort(out.ascending.begin(), out.ascending.end(),
                   [](const auto& a, const auto& b) {
                     return a.variance < b.variance;
                   });
  return out;
}

std::string WorstCaseComparison::Ordering(double relative_tolerance) const {
  std::vector<std::vector<std::string>> groups;
  double group_start = 0;
  for (const Entry& entry : ascending) {
    if (groups.empty() || std::abs(entry.variance - group_start) >
                              relative_tolerance * std::abs(group_start)) {
      groups.emplace_back();
      group_start = entry.variance;
    }
    groups.back().emplace_back(MultiMechanismName(entry.mechanism));
  }
  std::vector<std::string> parts;
  for (auto& group : groups) {
    std::sort(group.begin(), group.end());
    parts.push_back(absl::StrJoin(group, " = "));
  }
  return absl::StrJoin(parts, " < ");
}

}  // namespace ldp
