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


#include "ldp/datagen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace ldp {
namespace {

constexpr uint64_t kDataStream = 1;
constexpr double kMinAcceptance = 1e-6;

}  // namespace

double TruncGaussianAcceptance(double mu, double sigma) {
  const double scale = sigma * std::sqrt(2.0);
  return 0.5 * (std::erfc((-1 - mu) / scale) - std::erfc((1 - mu) / scale));
}

absl::Status SyntheticSpec::Validate() const {
  if (d < 1 || n < 1) {
    return absl::InvalidArgumentError("n and d must be at least 1");
  }
  switch (distribution) {
    case Distribution::kTruncGaussian:
      if (!(sigma > 0) || !std::isfinite(mu)) {
        return absl::InvalidArgumentError(
            "Truncated Gaussian needs finite mu and sigma > 0");
      }
      if (TruncGaussianAcceptance(mu, sigma) < kMinAcceptance) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Truncated Gaussian with mu = ", mu,
            " puts almost no mass on [-1, 1]"));
      }
      break;
    case Distribution::kPowerLaw:
      if (!(exponent > 1) || !std::isfinite(exponent)) {
        return absl::InvalidArgumentError("Power-law exponent must exceed 1");
      }
      break;
    case Distribution::kUniform:
      break;
  }
  return absl::OkStatus();
}

absl::Status ParseDistribution(absl::string_view text, SyntheticSpec& spec) {
  const size_t colon = text.find(':');
  const absl::string_view name = text.substr(0, colon);
  const bool has_arg = colon != absl::string_view::npos;
  const absl::string_view arg = has_arg ? text.substr(colon + 1) : "";
  if (name == "uniform" && !has_arg) {
    spec.distribution = Distribution::kUniform;
    return absl::OkStatus();
  }
  if (name == "trunc-gaussian" && has_arg) {
    spec.distribution = Distribution::kTruncGaussian;
    if (!absl::SimpleAtod(arg, &spec.mu)) {
      return absl::InvalidArgumentError(absl::StrCat("Bad mean '", arg, "'"));
    }
    return absl::OkStatus();
  }
  if (name == "power-law") {
    spec.distribution = Distribution::kPowerLaw;
    if (has_arg && !absl::SimpleAtod(arg, &spec.exponent)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Bad exponent '", arg, "'"));
    }
    return absl::OkStatus();
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "Unknown distribution '", text,
      "'; expected trunc-gaussian:<mu>, uniform or power-law[:<a>]"));
}

double SampleValue(const SyntheticSpec& spec, RandomSource& rng) {
  switch (spec.distribution) {
    case Distribution::kTruncGaussian:
      while (true) {
        const double x = spec.mu + spec.sigma * rng.Normal();
        if (x >= -1 && x <= 1) return x;
      }
    case Distribution::kUniform:
      return rng.UniformIn(-1, 1);
    case Distribution::kPowerLaw: {
      const double b = 1 - spec.exponent;
      const double u = rng.Uniform();
      const double x = std::pow(1 - u * (1 - std::pow(3.0, b)), 1 / b) - 2;
      return std::clamp(x, -1.0, 1.0);
    }
  }
  return 0;
}

absl::StatusOr<Dataset> Generate(const SyntheticSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  std::vector<AttributeSpec> attributes;
  for (int j = 1; j <= spec.d; ++j) {
    attributes.push_back(AttributeSpec::Numeric(absl::StrCat("x", j), 1));
  }
  absl::StatusOr<Schema> schema = Schema::Create(std::move(attributes));
  if (!schema.ok()) return schema.status();
  return GenerateForSchema(*schema, spec);
}

absl::StatusOr<Dataset> GenerateForSchema(const Schema& schema,
                                          const SyntheticSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  const int d = schema.dimension();
  // Cumulative Zipf weights per categorical attribute.
  std::vector<std::vector<double>> cumulative(d);
  for (int j = 0; j < d; ++j) {
    const AttributeSpec& a = schema.attribute(j);
    if (!a.is_categorical()) continue;
    double total = 0;
    for (int v = 1; v <= a.cardinality; ++v) {
      total += 1.0 / v;
      cumulative[j].push_back(total);
    }
    for (double& c : cumulative[j]) c /= total;
  }
  std::vector<double> values(static_cast<size_t>(spec.n) * d);
  const RandomSource root(spec.seed, kDataStream);
  for (int64_t i = 0; i < spec.n; ++i) {
    RandomSource rng = root.Derive(static_cast<uint64_t>(i));
    double* row = values.data() + i * d;
    for (int j = 0; j < d; ++j) {
      const AttributeSpec& a = schema.attribute(j);
      if (a.is_numeric()) {
        row[j] = Denormalize(SampleValue(spec, rng), a);
      } else {
        const double u = rng.Uniform();
        const auto it = std::upper_bound(cumulative[j].begin(),
                                         cumulative[j].end(), u);
        row[j] = static_cast<double>(
            std::min<int64_t>(it - cumulative[j].begin(), a.cardinality - 1) +
            1);
      }
    }
  }
  return Dataset(schema, std::move(values));
}

int EncodedWidth(const Schema& schema) {
  int width = 0;
  for (const AttributeSpec& a : schema.attributes()) {
    width += a.is_numeric() ? 1 : a.cardinality - 1;
  }
  return width;
}

std::vector<double> OneHotEncode(std::span<const double> values,
                                 const Schema& schema) {
  std::vector<double> out;
  out.reserve(EncodedWidth(schema));
  for (int j = 0; j < schema.dimension(); ++j) {
    const AttributeSpec& a = schema.attribute(j);
    if (a.is_numeric()) {
      out.push_back(values[j] / a.range);
      continue;
    }
    const int value = static_cast<int>(values[j]);
    for (int l = 1; l < a.cardinality; ++l) out.push_back(l == value ? 1 : 0);
  }
  return out;
}

std::vector<double> BinarizeLabel(std::span<const double> column) {
  const double mean =
      std::accumulate(column.begin(), column.end(), 0.0) / column.size();
  std::vector<double> out(column.size());
  for (size_t i = 0; i < column.size(); ++i) {
    out[i] = column[i] > mean ? 1 : -1;
  }
  return out;
}

absl::StatusOr<LabeledData> MakeLabeledData(const Dataset& dataset,
                                            absl::string_view label,
                                            LossKind kind) {
  const Schema& schema = dataset.schema();
  const int label_index = schema.IndexOf(label);
  if (label_index < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Label column '", label, "' is not in the schema"));
  }
  const AttributeSpec& label_spec = schema.attribute(label_index);
  if (kind == LossKind::kLinear && !label_spec.is_numeric()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Linear regression needs a numeric label; '", label,
                     "' is categorical"));
  }
  if (schema.dimension() < 2) {
    return absl::InvalidArgumentError("No feature columns besides the label");
  }
  std::vector<AttributeSpec> feature_specs;
  for (int j = 0; j < schema.dimension(); ++j) {
    if (j != label_index) feature_specs.push_back(schema.attribute(j));
  }
  const Schema features = *Schema::Create(std::move(feature_specs));

  const int64_t n = dataset.size();
  std::vector<double> column(n);
  for (int64_t i = 0; i < n; ++i) column[i] = dataset.Row(i)[label_index];
  std::vector<double> labels;
  if (kind == LossKind::kLinear) {
    for (double v : column) labels.push_back(v / label_spec.range);
  } else {
    labels = BinarizeLabel(column);
  }

  LabeledData out;
  out.d = EncodedWidth(features);
  out.features.reserve(static_cast<size_t>(n) * out.d);
  std::vector<double> row(features.dimension());
  for (int64_t i = 0; i < n; ++i) {
    const std::span<const double> full = dataset.Row(i);
    size_t w = 0;
    for (int j = 0; j < schema.dimension(); ++j) {
      if (j != label_index) row[w++] = full[j];
    }
    out.Append(OneHotEncode(row, features), labels[i]);
  }
  return out;
}

LabeledData GenerateSeparableTask(int d, int64_t n, LossKind kind,
                                  double margin, RandomSource& rng) {
  std::vector<double> w(d);
  double l1 = 0;
  for (double& v : w) {
    v = rng.Normal();
    l1 += std::abs(v);
  }
  for (double& v : w) v /= l1;
  LabeledData out;
  out.d = d;
  out.features.reserve(static_cast<size_t>(n) * d);
  out.labels.reserve(n);
  std::vector<double> x(d);
  while (out.size() < n) {
    double score = 0;
    for (int j = 0; j < d; ++j) {
      x[j] = rng.UniformIn(-1, 1);
      score += w[j] * x[j];
    }
    if (std::abs(score) < margin) continue;
    const double y =
        kind == LossKind::kLinear ? score : (score >= 0 ? 1.0 : -1.0);
    out.Append(x, y);
  }
  return out;
}

std::vector<std::vector<int64_t>> CrossValidationFolds(int64_t n, int folds,
                                                       RandomSource& rng) {
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int64_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(i + 1)]);
  }
  std::vector<std::vector<int64_t>> out(folds);
  for (int64_t i = 0; i < n; ++i) out[i % folds].push_back(order[i]);
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

std::string FoldsToText(const std::vector<std::vector<int64_t>>& folds) {
  std::string out;
  for (const auto& fold : folds) {
    absl::StrAppend(&out, absl::StrJoin(fold, " "), "\n");
  }
  return out;
}

}  // namespace ldp
