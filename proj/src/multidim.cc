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


#include "ldp/multidim.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace ldp {

int KOf(PrivacyBudget budget, int d) {
  const double k = std::floor(budget.epsilon() / 2.5);
  if (k < 1) return 1;
  if (k > d) return d;
  return static_cast<int>(k);
}

double DuchiMultiConstant(int d) {
  // Binomial coefficients in log space stay finite for large d.
  auto log_choose = [](int n, int r) {
    return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) -
           std::lgamma(n - r + 1.0);
  };
  const double log_half_cube = (d - 1) * std::log(2.0);
  if (d % 2 == 1) {
    return std::exp(log_half_cube - log_choose(d - 1, (d - 1) / 2));
  }
  const double numerator =
      std::exp(log_half_cube) + 0.5 * std::exp(log_choose(d, d / 2));
  return numerator / std::exp(log_choose(d - 1, d / 2));
}

DuchiMultiParams DuchiMultiParams::For(PrivacyBudget budget, int d) {
  const double cd = DuchiMultiConstant(d);
  return {cd, DuchiMagnitude(budget) * cd};
}

std::vector<double> DuchiMulti(std::span<const double> t, PrivacyBudget budget,
                               RandomSource& rng) {
  const int d = static_cast<int>(t.size());
  const int words = (d + 63) / 64;
  const double b = DuchiMultiParams::For(budget, d).b;
  const double e = std::exp(budget.epsilon());

  std::vector<uint64_t> v(words, 0);
  for (int j = 0; j < d; ++j) {
    if (rng.Bernoulli(0.5 + t[j] / 2)) v[j / 64] |= uint64_t{1} << (j % 64);
  }
  const bool positive_side = rng.Bernoulli(e / (e + 1));

  std::vector<uint64_t> s(words);
  while (true) {
    int disagreements = 0;
    for (int w = 0; w < words; ++w) {
      const int width = std::min(64, d - 64 * w);
      const uint64_t mask =
          width == 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
      s[w] = rng.NextU64() & mask;
      disagreements += std::popcount(s[w] ^ v[w]);
    }
    const int dot = d - 2 * disagreements;
    if (positive_side ? dot >= 0 : dot <= 0) break;
  }

  std::vector<double> out(d);
  for (int j = 0; j < d; ++j) {
    out[j] = ((s[j / 64] >> (j % 64)) & 1) ? b : -b;
  }
  return out;
}

SamplingPlan SamplingPlan::Draw(int d, int k, RandomSource& rng) {
  SamplingPlan plan{k, {}};
  if (k == d) {
    plan.indices.resize(d);
    std::iota(plan.indices.begin(), plan.indices.end(), 0);
    return plan;
  }
  if (k == 1) {
    plan.indices.push_back(static_cast<int>(rng.UniformInt(d)));
    return plan;
  }
  std::vector<int> pool(d);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int pick = i + static_cast<int>(rng.UniformInt(d - i));
    std::swap(pool[i], pool[pick]);
  }
  plan.indices.assign(pool.begin(), pool.begin() + k);
  return plan;
}

namespace {

Mechanism1d BaseMechanism(NumericBase base) {
  return base == NumericBase::kPiecewise ? Mechanism1d::kPiecewise
                                         : Mechanism1d::kHybrid;
}

}  // namespace

std::vector<double> PerturbNumericMulti(std::span<const double> t,
                                        PrivacyBudget budget, NumericBase base,
                                        RandomSource& rng) {
  const int d = static_cast<int>(t.size());
  const int k = KOf(budget, d);
  const Perturber1d perturb(BaseMechanism(base), budget.Scaled(1.0 / k));
  const double scale = static_cast<double>(d) / k;
  std::vector<double> out(d, 0.0);
  for (int j : SamplingPlan::Draw(d, k, rng).indices) {
    out[j] = scale * perturb(t[j], rng);
  }
  return out;
}

OueParams OueParams::For(PrivacyBudget budget) {
  return {0.5, 1 / (std::exp(budget.epsilon()) + 1)};
}

void OuePerturbInto(int value, int k_vals, const OueParams& params,
                    RandomSource& rng, std::vector<uint8_t>& bits) {
  bits.resize(k_vals);
  for (int v = 1; v <= k_vals; ++v) {
    bits[v - 1] = rng.Bernoulli(v == value ? params.p : params.q) ? 1 : 0;
  }
}

std::vector<uint8_t> OuePerturb(int value, int k_vals, PrivacyBudget budget,
                                RandomSource& rng) {
  std::vector<uint8_t> bits;
  OuePerturbInto(value, k_vals, OueParams::For(budget), rng, bits);
  return bits;
}

RecordPerturber::RecordPerturber(const Schema& schema, PrivacyBudget budget,
                                 NumericBase base)
    : schema_(&schema),
      k_(KOf(budget, schema.dimension())),
      attribute_budget_(budget.Scaled(1.0 / k_)),
      numeric_(BaseMechanism(base), attribute_budget_),
      oue_(OueParams::For(attribute_budget_)) {}

absl::Status RecordPerturber::Perturb(int64_t user_id,
                                      std::span<const double> values,
                                      RandomSource& rng,
                                      Report& report) const {
  if (absl::Status status = ValidateTuple(*schema_, values); !status.ok()) {
    return status;
  }
  const int d = schema_->dimension();
  const double scale = static_cast<double>(d) / k_;
  const SamplingPlan plan = SamplingPlan::Draw(d, k_, rng);
  report.user_id = user_id;
  report.entries.resize(k_);
  for (int i = 0; i < k_; ++i) {
    const int j = plan.indices[i];
    const AttributeSpec& spec = schema_->attribute(j);
    ReportEntry& entry = report.entries[i];
    entry.attribute = j;
    entry.categorical = spec.is_categorical();
    if (entry.categorical) {
      entry.numeric = 0;
      OuePerturbInto(static_cast<int>(values[j]), spec.cardinality, oue_, rng,
              entry.bits);
    } else {
      entry.bits.clear();
      entry.numeric = scale * numeric_(values[j] / spec.range, rng);
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Report> PerturbRecord(int64_t user_id,
                                     std::span<const double> values,
                                     const Schema& schema, PrivacyBudget budget,
                                     NumericBase base, RandomSource& rng) {
  Report report;
  absl::Status status =
      RecordPerturber(schema, budget, base).Perturb(user_id, values, rng,
                                                    report);
  if (!status.ok()) return status;
  return report;
}

std::string SerializeReports(std::span<const Report> reports) {
  std::string out;
  for (const Report& report : reports) {
    for (const ReportEntry& entry : report.entries) {
      absl::StrAppend(&out, report.user_id, ",", entry.attribute + 1, ",");
      if (entry.categorical) {
        out += "C,";
        for (uint8_t bit : entry.bits) out += bit ? '1' : '0';
      } else {
        absl::StrAppend(&out, "N,", FormatDouble(entry.numeric));
      }
      out += '\n';
    }
  }
  return out;
}

absl::StatusOr<std::vector<Report>> ParseReports(absl::string_view text,
                                                 const Schema& schema) {
  std::vector<Report> reports;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto error = [&](absl::string_view what) {
      return absl::InvalidArgumentError(
          absl::StrCat("Report line ", line_number, ": ", what));
    };
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (fields.size() != 4) return error("expected 4 fields");
    int64_t user_id;
    int attribute;
    if (!absl::SimpleAtoi(fields[0], &user_id)) return error("bad user id");
    if (!absl::SimpleAtoi(fields[1], &attribute) || attribute < 1 ||
        attribute > schema.dimension()) {
      return error("attribute index out of range");
    }
    const AttributeSpec& spec = schema.attribute(attribute - 1);
    ReportEntry entry;
    entry.attribute = attribute - 1;
    if (fields[2] == "N") {
      if (!spec.is_numeric()) return error("numeric payload for categorical");
      if (!absl::SimpleAtod(fields[3], &entry.numeric) ||
          !std::isfinite(entry.numeric)) {
        return error("bad numeric payload");
      }
    } else if (fields[2] == "C") {
      if (!spec.is_categorical()) return error("bit payload for numeric");
      if (static_cast<int>(fields[3].size()) != spec.cardinality) {
        return error("bit string length differs from cardinality");
      }
      entry.categorical = true;
      for (char c : fields[3]) {
        if (c != '0' && c != '1') return error("bit string must be 0/1");
        entry.bits.push_back(c == '1');
      }
    } else {
      return error("payload kind must be N or C");
    }
    if (reports.empty() || reports.back().user_id != user_id) {
      reports.push_back({user_id, {}});
    }
    for (const ReportEntry& seen : reports.back().entries) {
      if (seen.attribute == entry.attribute) {
        return error("duplicate attribute in report");
      }
    }
    reports.back().entries.push_back(std::move(entry));
  }
  return reports;
}

}  // namespace ldp
