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

#include "ldp/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace ldp {
namespace {

double PiecewiseVariance(double t, double eps) {
  const double h = std::exp(eps / 2);
  return t * t / (h - 1) + (h + 3) / (3 * (h - 1) * (h - 1));
}

double DuchiVariance(double t, double eps) {
  const double b = (std::exp(eps) + 1) / std::expm1(eps);
  return b * b - t * t;
}

}  // namespace

absl::StatusOr<Mechanism1d> ParseMechanism1d(absl::string_view name) {
  if (name == "laplace") return Mechanism1d::kLaplace;
  if (name == "duchi") return Mechanism1d::kDuchi;
  if (name == "pm") return Mechanism1d::kPiecewise;
  if (name == "hm") return Mechanism1d::kHybrid;
  if (name == "scdf") return Mechanism1d::kScdf;
  if (name == "staircase") return Mechanism1d::kStaircase;
  return absl::InvalidArgumentError(
      absl::StrCat("Unknown mechanism '", name, "'"));
}

absl::string_view MechanismName(Mechanism1d mechanism) {
  switch (mechanism) {
    case Mechanism1d::kLaplace:
      return "laplace";
    case Mechanism1d::kDuchi:
      return "duchi";
    case Mechanism1d::kPiecewise:
      return "pm";
    case Mechanism1d::kHybrid:
      return "hm";
    case Mechanism1d::kScdf:
      return "scdf";
    case Mechanism1d::kStaircase:
      return "staircase";
  }
  return "unknown";
}

double HybridThreshold() {
  static const double value = std::log(
      (-5 + 2 * std::cbrt(6353 - 405 * std::sqrt(241.0)) +
       2 * std::cbrt(6353 + 405 * std::sqrt(241.0))) /
      27);
  return value;
}

double PiecewiseDuchiCrossover() {
  static const double value = std::log(
      (7 + 4 * std::sqrt(7.0) + 2 * std::sqrt(20 + 14 * std::sqrt(7.0))) / 9);
  return value;
}

PiecewiseParams PiecewiseParams::For(PrivacyBudget budget) {
  const double eps = budget.epsilon();
  const double h = std::exp(eps / 2);
  PiecewiseParams params;
  params.c = (h + 1) / (h - 1);
  params.exp_eps = std::exp(eps);
  params.p = (params.exp_eps - h) / (2 * h + 2);
  params.center_mass = h / (h + 1);
  return params;
}

HybridParams HybridParams::For(PrivacyBudget budget) {
  const double eps = budget.epsilon();
  return {eps > HybridThreshold() ? -std::expm1(-eps / 2) : 0.0};
}

StairParams StairParams::For(PrivacyBudget budget, StairVariant variant) {
  const double eps = budget.epsilon();
  const double r = std::exp(-eps);
  StairParams params;
  params.ratio = r;
  if (variant == StairVariant::kScdf) {
    params.m = 2 * (1 - r - eps * r) / (eps - eps * r);
    params.a = eps / 4;
  } else {
    params.m = 2 / (1 + std::exp(eps / 2));
    params.a = (1 - r) / (2 * params.m + 4 * r - 2 * params.m * r);
  }
  return params;
}

double StairParams::TotalMass() const {
  return 2 * m * a + 4 * a * ratio / (1 - ratio);
}

double DuchiMagnitude(PrivacyBudget budget) {
  const double eps = budget.epsilon();
  return (std::exp(eps) + 1) / std::expm1(eps);
}

double DuchiPositiveProbability(double t, PrivacyBudget budget) {
  const double e = std::exp(budget.epsilon());
  return (e - 1) / (2 * e + 2) * t + 0.5;
}

double LaplaceQuantile(double u, double scale) {
  const double centered = u - 0.5;
  if (centered == 0) return 0;
  const double magnitude = -scale * std::log1p(-2 * std::abs(centered));
  return centered < 0 ? -magnitude : magnitude;
}

double LaplacePerturb(double t, PrivacyBudget budget, RandomSource& rng) {
  return t + LaplaceQuantile(rng.UniformOpen(), 2 / budget.epsilon());
}

double DuchiPerturb(double t, PrivacyBudget budget, RandomSource& rng) {
  const double magnitude = DuchiMagnitude(budget);
  return rng.Bernoulli(DuchiPositiveProbability(t, budget)) ? magnitude
                                                            : -magnitude;
}

double PiecewisePerturb(double t, PrivacyBudget budget, RandomSource& rng) {
  return PiecewisePerturb(t, PiecewiseParams::For(budget), rng);
}

double PiecewisePerturb(double t, const PiecewiseParams& params,
                        RandomSource& rng) {
  const double left = params.Left(t);
  const double right = params.Right(t);
  if (rng.Uniform() < params.center_mass) {
    return rng.UniformIn(left, right);
  }
  // Outer density is constant, so choose a side in proportion to its length.
  // At t = +-1 one side has length 0 and is never chosen.
  const double left_length = left + params.c;
  const double right_length = params.c - right;
  const double y = rng.Uniform() * (left_length + right_length);
  if (y < left_length) return -params.c + y;
  return right + (y - left_length);
}

double PiecewisePdf(double t, double x, PrivacyBudget budget) {
  const PiecewiseParams params = PiecewiseParams::For(budget);
  if (x < -params.c || x > params.c) return 0;
  if (x >= params.Left(t) && x <= params.Right(t)) return params.p;
  return params.p / params.exp_eps;
}

double HybridPerturb(double t, PrivacyBudget budget, RandomSource& rng) {
  if (rng.Uniform() < HybridParams::For(budget).alpha) {
    return PiecewisePerturb(t, budget, rng);
  }
  return DuchiPerturb(t, budget, rng);
}

double StairNoise(const StairParams& params, RandomSource& rng) {
  const double u = rng.Uniform() * params.TotalMass();
  if (u < params.CenterMass()) return -params.m + 2 * params.m * rng.Uniform();
  // Piece index is geometric: Pr[j] = (1 - r) r^j.
  const double j =
      std::floor(std::log(rng.UniformOpen()) / std::log(params.ratio));
  const double magnitude = params.m + 2 * j + 2 * rng.Uniform();
  return rng.Bernoulli(0.5) ? magnitude : -magnitude;
}

double StairPerturb(double t, PrivacyBudget budget, StairVariant variant,
                    RandomSource& rng) {
  return t + StairNoise(StairParams::For(budget, variant), rng);
}

double StairNoiseVariance(const StairParams& params) {
  const double m = params.m;
  const double r = params.ratio;
  // Integral of x^2 over [x, x + 2] is ((x + 2)^3 - x^3) / 3.
  auto piece = [](double x) { return 6 * x * x + 12 * x + 8; };
  double one_side = params.a * m * m * m / 3;
  double weight = r;
  for (int j = 0;; ++j) {
    const double x = m + 2 * j;
    const double term = params.a * weight * piece(x) / 3;
    one_side += term;
    // Successive term ratios are bounded by rho for all later pieces, since
    // piece(x + 2) / piece(x) decreases in x.
    const double rho = r * piece(x + 2) / piece(x);
    if (rho < 1 && 2 * term * rho / (1 - rho) < 1e-12) break;
    weight *= r;
  }
  return 2 * one_side;
}

double Variance1d(Mechanism1d mechanism, double t, PrivacyBudget budget) {
  const double eps = budget.epsilon();
  switch (mechanism) {
    case Mechanism1d::kLaplace:
      return 8 / (eps * eps);
    case Mechanism1d::kDuchi:
      return DuchiVariance(t, eps);
    case Mechanism1d::kPiecewise:
      return PiecewiseVariance(t, eps);
    case Mechanism1d::kHybrid: {
      const double alpha = HybridParams::For(budget).alpha;
      return alpha * PiecewiseVariance(t, eps) +
             (1 - alpha) * DuchiVariance(t, eps);
    }
    case Mechanism1d::kScdf:
      return StairNoiseVariance(StairParams::For(budget, StairVariant::kScdf));
    case Mechanism1d::kStaircase:
      return StairNoiseVariance(
          StairParams::For(budget, StairVariant::kStaircase));
  }
  return std::nan("");
}

double WorstCaseVariance1d(Mechanism1d mechanism, PrivacyBudget budget) {
  return std::max(Variance1d(mechanism, 0, budget),
                  Variance1d(mechanism, 1, budget));
}

Perturber1d::Perturber1d(Mechanism1d mechanism, PrivacyBudget budget)
    : mechanism_(mechanism), budget_(budget) {
  const double e = std::exp(budget.epsilon());
  laplace_scale_ = 2 / budget.epsilon();
  duchi_magnitude_ = DuchiMagnitude(budget);
  duchi_slope_ = (e - 1) / (2 * e + 2);
  piecewise_ = PiecewiseParams::For(budget);
  hybrid_ = HybridParams::For(budget);
  if (mechanism == Mechanism1d::kScdf) {
    stair_ = StairParams::For(budget, StairVariant::kScdf);
  } else if (mechanism == Mechanism1d::kStaircase) {
    stair_ = StairParams::For(budget, StairVariant::kStaircase);
  }
}

double Perturber1d::operator()(double t, RandomSource& rng) const {
  auto duchi = [&] {
    return rng.Uniform() < duchi_slope_ * t + 0.5 ? duchi_magnitude_
                                                  : -duchi_magnitude_;
  };
  switch (mechanism_) {
    case Mechanism1d::kLaplace:
      return t + LaplaceQuantile(rng.UniformOpen(), laplace_scale_);
    case Mechanism1d::kDuchi:
      return duchi();
    case Mechanism1d::kPiecewise:
      return PiecewisePerturb(t, piecewise_, rng);
    case Mechanism1d::kHybrid:
      if (rng.Uniform() < hybrid_.alpha) {
        return PiecewisePerturb(t, piecewise_, rng);
      }
      return duchi();
    case Mechanism1d::kScdf:
    case Mechanism1d::kStaircase:
      return t + StairNoise(stair_, rng);
  }
  return std::nan("");
}

}  // namespace ldp
