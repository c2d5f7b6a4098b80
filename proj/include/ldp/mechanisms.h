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

// One-dimensional numeric perturbation mechanisms for inputs in [-1, 1],
// with their exact output densities and variances.
//
// Every mechanism here is unbiased: E[output | t] = t.
//
//   Laplace    t + Lap(2 / eps)
//   Duchi      two-point output +-(e^eps + 1) / (e^eps - 1)
//   Piecewise  bounded output in [-C, C], three-piece constant density
//   Hybrid     coin flip between Piecewise and Duchi
//   SCDF,      t + noise from an unbounded staircase-shaped density
//   Staircase

#ifndef LDP_MECHANISMS_H_
#define LDP_MECHANISMS_H_

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldp/random.h"
#include "ldp/schema.h"

namespace ldp {

enum class Mechanism1d { kLaplace, kDuchi, kPiecewise, kHybrid, kScdf, kStaircase };

inline constexpr Mechanism1d kAllMechanisms1d[] = {
    Mechanism1d::kLaplace, Mechanism1d::kDuchi, Mechanism1d::kPiecewise,
    Mechanism1d::kHybrid,  Mechanism1d::kScdf,  Mechanism1d::kStaircase};

// Accepts "laplace", "duchi", "pm", "hm", "scdf", "staircase".
absl::StatusOr<Mechanism1d> ParseMechanism1d(absl::string_view name);
absl::string_view MechanismName(Mechanism1d mechanism);

// Budget at or below which the Hybrid mechanism degenerates to Duchi's
// (alpha = 0). Root of the closed-form cubic in e^eps, ~0.6094.
double HybridThreshold();
// Budget at which worst-case Piecewise and Duchi variances coincide, ~1.2898.
double PiecewiseDuchiCrossover();

struct PiecewiseParams {
  double c;            // Output range is [-c, c].
  double p;            // Density on the center piece.
  double center_mass;  // p * (c - 1) = e^(eps/2) / (e^(eps/2) + 1).
  double exp_eps;      // e^eps; outer density is p / exp_eps.

  static PiecewiseParams For(PrivacyBudget budget);

  double Left(double t) const { return (c + 1) / 2 * t - (c - 1) / 2; }
  double Right(double t) const { return Left(t) + c - 1; }
};

struct HybridParams {
  double alpha;  // Probability of using the Piecewise branch.
  static HybridParams For(PrivacyBudget budget);
};

enum class StairVariant { kScdf, kStaircase };

// Noise density: height `a` on [-m, m]; side piece j >= 0 covering
// [m + 2j, m + 2j + 2] (and its mirror) at height a * ratio^(j + 1).
struct StairParams {
  double m;
  double a;
  double ratio;  // e^-eps.

  static StairParams For(PrivacyBudget budget, StairVariant variant);

  double CenterMass() const { return 2 * m * a; }
  // Analytic total probability mass; equals 1 for both variants.
  double TotalMass() const;
};

// Magnitude of Duchi's two output points.
double DuchiMagnitude(PrivacyBudget budget);
double DuchiPositiveProbability(double t, PrivacyBudget budget);

double LaplacePerturb(double t, PrivacyBudget budget, RandomSource& rng);
// Inverse CDF of the zero-mean Laplace distribution at u in (0, 1).
double LaplaceQuantile(double u, double scale);

double DuchiPerturb(double t, PrivacyBudget budget, RandomSource& rng);

double PiecewisePerturb(double t, PrivacyBudget budget, RandomSource& rng);
double PiecewisePerturb(double t, const PiecewiseParams& params,
                        RandomSource& rng);
// Output density at x given input t; 0 outside [-C, C].
double PiecewisePdf(double t, double x, PrivacyBudget budget);

double HybridPerturb(double t, PrivacyBudget budget, RandomSource& rng);

double StairPerturb(double t, PrivacyBudget budget, StairVariant variant,
                    RandomSource& rng);
double StairNoise(const StairParams& params, RandomSource& rng);
// Second moment of the stair noise, summed until the geometric tail bound
// drops below 1e-12.
double StairNoiseVariance(const StairParams& params);

// Exact output variance given input t.
double Variance1d(Mechanism1d mechanism, double t, PrivacyBudget budget);
// max over t in [-1, 1]; every variance here is affine in t^2, so the
// maximum sits at t = 0 or |t| = 1.
double WorstCaseVariance1d(Mechanism1d mechanism, PrivacyBudget budget);

// Precomputes a mechanism's constants for repeated use at one budget.
class Perturber1d {
 public:
  Perturber1d(Mechanism1d mechanism, PrivacyBudget budget);

  Mechanism1d mechanism() const { return mechanism_; }
  double operator()(double t, RandomSource& rng) const;

 private:
  Mechanism1d mechanism_;
  PrivacyBudget budget_;
  double laplace_scale_ = 0;
  double duchi_magnitude_ = 0;
  double duchi_slope_ = 0;
  PiecewiseParams piecewise_{};
  HybridParams hybrid_{};
  StairParams stair_{};
};

}  // namespace ldp

#endif  // LDP_MECHANISMS_H_
