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


#include "ldp/sgd.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "ldp/mechanisms.h"
#include "ldp/multidim.h"

namespace ldp {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

absl::Status CheckShapes(std::span<const double> beta,
                         std::span<const double> x) {
  if (beta.size() != x.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Model has ", beta.size(), " coordinates but features have ",
                     x.size()));
  }
  return absl::OkStatus();
}

// Stream index for the shuffle; user streams use the row index.
constexpr uint64_t kShuffleStream = ~uint64_t{0};

}  // namespace

absl::StatusOr<LossKind> ParseLossKind(absl::string_view name) {
  if (name == "linear") return LossKind::kLinear;
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "svm") return LossKind::kSvm;
  return absl::InvalidArgumentError(
      absl::StrCat("Unknown loss '", name, "'; expected linear|logistic|svm"));
}

absl::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kLinear:
      return "linear";
    case LossKind::kLogistic:
      return "logistic";
    case LossKind::kSvm:
      return "svm";
  }
  return "unknown";
}

absl::StatusOr<GradientMechanism> ParseGradientMechanism(
    absl::string_view name) {
  if (name == "pm") return GradientMechanism::kPiecewise;
  if (name == "hm") return GradientMechanism::kHybrid;
  if (name == "duchi") return GradientMechanism::kDuchi;
  if (name == "laplace") return GradientMechanism::kLaplaceSplit;
  if (name == "none") return GradientMechanism::kNonPrivate;
  return absl::InvalidArgumentError(absl::StrCat(
      "Unknown gradient mechanism '", name, "'; expected pm|hm|duchi|laplace|none"));
}

absl::string_view GradientMechanismName(GradientMechanism mechanism) {
  switch (mechanism) {
    case GradientMechanism::kPiecewise:
      return "pm";
    case GradientMechanism::kHybrid:
      return "hm";
    case GradientMechanism::kDuchi:
      return "duchi";
    case GradientMechanism::kLaplaceSplit:
      return "laplace";
    case GradientMechanism::kNonPrivate:
      return "none";
  }
  return "unknown";
}

int DefaultGroupSize(int d, double epsilon) {
  return static_cast<int>(
      std::ceil(d * std::log(std::max(d, 2)) / (epsilon * epsilon)));
}

absl::Status SgdConfig::Validate() const {
  if (!(lambda >= 0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError("lambda must be finite and >= 0");
  }
  if (group_size < 0) {
    return absl::InvalidArgumentError("group size must be positive");
  }
  if (!(lr_const > 0) || !std::isfinite(lr_const)) {
    return absl::InvalidArgumentError("learning-rate constant must be > 0");
  }
  if (log_interval < 1) {
    return absl::InvalidArgumentError("log interval must be >= 1");
  }
  return PrivacyBudget::Create(epsilon).status();
}

void LabeledData::Append(std::span<const double> x, double y) {
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(y);
}

LabeledData LabeledData::Subset(std::span<const int64_t> rows) const {
  LabeledData out;
  out.d = d;
  out.features.reserve(rows.size() * d);
  out.labels.reserve(rows.size());
  for (int64_t i : rows) out.Append(Row(i), labels[i]);
  return out;
}

absl::Status ValidateLabel(LossKind kind, double y) {
  if (kind == LossKind::kLinear) {
    if (!(std::abs(y) <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Linear label ", y, " outside [-1, 1]"));
    }
  } else if (y != 1 && y != -1) {
    return absl::InvalidArgumentError(
        absl::StrCat("Classification label ", y, " is not -1 or +1"));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Loss(LossKind kind, std::span<const double> beta,
                            std::span<const double> x, double y,
                            double lambda) {
  if (absl::Status s = CheckShapes(beta, x); !s.ok()) return s;
  if (absl::Status s = ValidateLabel(kind, y); !s.ok()) return s;
  const double score = Dot(x, beta);
  double loss = 0;
  switch (kind) {
    case LossKind::kLinear:
      loss = (score - y) * (score - y);
      break;
    case LossKind::kLogistic: {
      // log(1 + e^z) without overflow.
      const double z = -y * score;
      loss = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      break;
    }
    case LossKind::kSvm:
      loss = std::max(0.0, 1 - y * score);
      break;
  }
  return loss + lambda / 2 * Dot(beta, beta);
}

absl::StatusOr<std::vector<double>> Gradient(LossKind kind,
                                             std::span<const double> beta,
                                             std::span<const double> x,
                                             double y, double lambda) {
  if (absl::Status s = CheckShapes(beta, x); !s.ok()) return s;
  if (absl::Status s = ValidateLabel(kind, y); !s.ok()) return s;
  const double score = Dot(x, beta);
  double coefficient = 0;  // Gradient of the data term is coefficient * x.
  switch (kind) {
    case LossKind::kLinear:
      coefficient = 2 * (score - y);
      break;
    case LossKind::kLogistic: {
      // -y / (1 + e^(y score)), written to stay finite for large |score|.
      const double z = y * score;
      coefficient = z > 0 ? -y * std::exp(-z) / (1 + std::exp(-z))
                          : -y / (1 + std::exp(z));
      break;
    }
    case LossKind::kSvm:
      coefficient = y * score < 1 ? -y : 0;
      break;
  }
  std::vector<double> g(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    g[j] = coefficient * x[j] + lambda * beta[j];
  }
  return g;
}

std::vector<double> ClipGradient(std::span<const double> g) {
  std::vector<double> out(g.size());
  for (size_t j = 0; j < g.size(); ++j) out[j] = std::clamp(g[j], -1.0, 1.0);
  return out;
}

std::vector<double> PerturbGradient(std::span<const double> clipped,
                                    PrivacyBudget budget,
                                    GradientMechanism mechanism,
                                    RandomSource& rng) {
  switch (mechanism) {
    case GradientMechanism::kPiecewise:
      return PerturbNumericMulti(clipped, budget, NumericBase::kPiecewise, rng);
    case GradientMechanism::kHybrid:
      return PerturbNumericMulti(clipped, budget, NumericBase::kHybrid, rng);
    case GradientMechanism::kDuchi:
      return DuchiMulti(clipped, budget, rng);
    case GradientMechanism::kLaplaceSplit: {
      const double scale = 2 * clipped.size() / budget.epsilon();
      std::vector<double> out(clipped.begin(), clipped.end());
      for (double& v : out) v += LaplaceQuantile(rng.UniformOpen(), scale);
      return out;
    }
    case GradientMechanism::kNonPrivate:
      break;
  }
  return {clipped.begin(), clipped.end()};
}

absl::StatusOr<TrainResult> Train(const LabeledData& data,
                                  const SgdConfig& config, RandomSource& rng,
                                  const LabeledData* holdout) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const PrivacyBudget budget = *PrivacyBudget::Create(config.epsilon);
  const int d = data.d;
  const int64_t n = data.size();
  const int group =
      config.group_size > 0 ? config.group_size
                            : DefaultGroupSize(d, config.epsilon);
  if (group > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Group size ", group, " exceeds the ", n, " training users"));
  }
  if (holdout != nullptr && holdout->d != d) {
    return absl::InvalidArgumentError("Holdout dimension differs from data");
  }
  for (int64_t i = 0; i < n; ++i) {
    if (absl::Status s = ValidateLabel(config.loss, data.labels[i]); !s.ok()) {
      return s;
    }
  }

  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RandomSource shuffle = rng.Derive(kShuffleStream);
  for (int64_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[shuffle.UniformInt(i + 1)]);
  }

  TrainResult result;
  result.beta.assign(d, 0.0);
  const int64_t iterations = n / group;
  result.participants.reserve(iterations * group);
  std::vector<double> average(d);
  for (int64_t t = 1; t <= iterations; ++t) {
    std::fill(average.begin(), average.end(), 0.0);
    for (int64_t g = 0; g < group; ++g) {
      const int64_t row = order[(t - 1) * group + g];
      result.participants.push_back(row);
      // Features and labels were validated above.
      const std::vector<double> gradient = *Gradient(
          config.loss, result.beta, data.Row(row), data.labels[row],
          config.lambda);
      RandomSource user = rng.Derive(static_cast<uint64_t>(row));
      const std::vector<double> noisy = PerturbGradient(
          ClipGradient(gradient), budget, config.mechanism, user);
      for (int j = 0; j < d; ++j) average[j] += noisy[j];
    }
    const double gamma = config.lr_const / std::sqrt(static_cast<double>(t));
    double norm = 0;
    for (int j = 0; j < d; ++j) {
      average[j] /= group;
      norm += average[j] * average[j];
      result.beta[j] -= gamma * average[j];
      if (!std::isfinite(result.beta[j])) {
        return absl::InternalError(
            absl::StrCat("Model diverged at iteration ", t));
      }
    }
    if (t % config.log_interval == 0 || t == iterations) {
      IterationRecord record{t, gamma, std::nan(""), std::sqrt(norm)};
      if (holdout != nullptr && holdout->size() > 0) {
        record.holdout_loss =
            *MeanLoss(result.beta, *holdout, config.loss, config.lambda);
      }
      result.log.push_back(record);
    }
  }
  return result;
}

absl::StatusOr<double> Evaluate(std::span<const double> beta,
                                const LabeledData& data, LossKind kind) {
  if (data.size() == 0) {
    return absl::InvalidArgumentError("Cannot evaluate on an empty test set");
  }
  if (static_cast<int>(beta.size()) != data.d) {
    return absl::InvalidArgumentError("Model and data dimensions differ");
  }
  double total = 0;
  for (int64_t i = 0; i < data.size(); ++i) {
    const double score = Dot(data.Row(i), beta);
    const double y = data.labels[i];
    if (kind == LossKind::kLinear) {
      total += (score - y) * (score - y);
    } else {
      const double predicted = score >= 0 ? 1 : -1;
      total += predicted != y ? 1 : 0;
    }
  }
  return total / static_cast<double>(data.size());
}

absl::StatusOr<double> MeanLoss(std::span<const double> beta,
                                const LabeledData& data, LossKind kind,
                                double lambda) {
  if (data.size() == 0) {
    return absl::InvalidArgumentError("Cannot evaluate on an empty set");
  }
  double total = 0;
  for (int64_t i = 0; i < data.size(); ++i) {
    absl::StatusOr<double> loss =
        Loss(kind, beta, data.Row(i), data.labels[i], lambda);
    if (!loss.ok()) return loss.status();
    total += *loss;
  }
  return total / static_cast<double>(data.size());
}

std::string TrainingLogCsv(const TrainResult& result) {
  std::string out = "t,gamma,metric_on_holdout,grad_norm_estimate\n";
  for (const IterationRecord& r : result.log) {
    absl::StrAppend(&out, r.t, ",", FormatDouble(r.gamma), ",",
                    FormatDouble(r.holdout_loss), ",",
                    FormatDouble(r.grad_norm), "\n");
  }
  return out;
}

std::string ModelCsv(std::span<const double> beta) {
  std::string out = "coordinate,beta\n";
  for (size_t j = 0; j < beta.size(); ++j) {
    absl::StrAppend(&out, j + 1, ",", FormatDouble(beta[j]), "\n");
  }
  return out;
}

}  // namespace ldp
