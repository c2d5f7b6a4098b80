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
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ldp/mechanisms.h"
#include "ldp/random.h"
#include "stats_util.h"
#include "status_matchers.h"

namespace ldp {
namespace {

using ::ldp::testing::ChiSquare;
using ::ldp::testing::ChiSquareCritical;
using ::ldp::testing::ComputeMoments;
using ::ldp::testing::IsOk;
using ::ldp::testing::StatusIs;
using ::testing::HasSubstr;

PrivacyBudget Eps(double epsilon) { return *PrivacyBudget::Create(epsilon); }

TEST(KOfTest, Examples) {
  EXPECT_EQ(KOf(Eps(1), 10), 1);
  EXPECT_EQ(KOf(Eps(5), 10), 2);
  EXPECT_EQ(KOf(Eps(100), 10), 10);
  EXPECT_EQ(KOf(Eps(0.01), 1), 1);
  for (int d : {1, 3, 16, 90}) {
    for (double eps : {0.1, 2.4, 2.5, 7.6, 1000.0}) {
      const int k = KOf(Eps(eps), d);
      EXPECT_GE(k, 1);
      EXPECT_LE(k, d);
    }
  }
}

TEST(DuchiMultiConstantTest, SmallValues) {
  EXPECT_DOUBLE_EQ(DuchiMultiConstant(1), 1);
  EXPECT_NEAR(DuchiMultiConstant(2), 3, 1e-12);
  EXPECT_NEAR(DuchiMultiConstant(3), 2, 1e-12);
  EXPECT_NEAR(DuchiMultiParams::For(Eps(1), 1).b, DuchiMagnitude(Eps(1)),
              1e-12);
  const double b = DuchiMultiParams::For(Eps(0.5), 90).b;
  EXPECT_TRUE(std::isfinite(b));
  EXPECT_GT(b, 0);
}

// Exact output distribution of the d-dimensional mechanism by enumerating
// every vertex v and corner s. Corner index bit j set means s_j = +1.
std::vector<double> EnumerateCornerProbabilities(const std::vector<double>& t,
                                                 double eps) {
  const int d = static_cast<int>(t.size());
  const int corners = 1 << d;
  const double e = std::exp(eps);
  std::vector<double> probability(corners, 0.0);
  for (int v = 0; v < corners; ++v) {
    double pv = 1;
    for (int j = 0; j < d; ++j) {
      pv *= (v >> j & 1) ? 0.5 + t[j] / 2 : 0.5 - t[j] / 2;
    }
    std::vector<int> plus, minus;
    for (int s = 0; s < corners; ++s) {
      int dot = 0;
      for (int j = 0; j < d; ++j) dot += ((s >> j & 1) == (v >> j & 1)) ? 1 : -1;
      if (dot >= 0) plus.push_back(s);
      if (dot <= 0) minus.push_back(s);
    }
    for (int s : plus) probability[s] += pv * e / (e + 1) / plus.size();
    for (int s : minus) probability[s] += pv / (e + 1) / minus.size();
  }
  return probability;
}

TEST(DuchiMultiTest, EnumerationOracleIsUnbiased) {
  for (int d : {1, 2, 3, 4, 5, 6}) {
    std::vector<double> t(d);
    for (int j = 0; j < d; ++j) t[j] = -0.9 + 1.7 * j / std::max(d - 1, 1);
    const double eps = 1.2;
    const std::vector<double> p = EnumerateCornerProbabilities(t, eps);
    const double b = DuchiMultiParams::For(Eps(eps), d).b;
    for (int j = 0; j < d; ++j) {
      double mean = 0;
      for (size_t s = 0; s < p.size(); ++s) mean += p[s] * ((s >> j & 1) ? b : -b);
      EXPECT_NEAR(mean, t[j], 1e-12) << "d=" << d << " j=" << j;
    }
  }
}

TEST(DuchiMultiTest, SamplerMatchesEnumeration) {
  for (int d : {3, 4}) {
    const std::vector<double> t = d == 3 ? std::vector<double>{0.5, -0.2, 0.9}
                                         : std::vector<double>{0.1, -0.7, 0.4,
                                                               1.0};
    const double eps = 0.8;
    const std::vector<double> p = EnumerateCornerProbabilities(t, eps);
    constexpr int kDraws = 200000;
    std::vector<double> counts(p.size(), 0.0);
    RandomSource rng(41, d);
    const double b = DuchiMultiParams::For(Eps(eps), d).b;
    for (int i = 0; i < kDraws; ++i) {
      const std::vector<double> out = DuchiMulti(t, Eps(eps), rng);
      int s = 0;
      for (int j = 0; j < d; ++j) {
        ASSERT_EQ(std::abs(out[j]), b);
        if (out[j] > 0) s |= 1 << j;
      }
      counts[s] += 1;
    }
    std::vector<double> expected(p.size());
    for (size_t s = 0; s < p.size(); ++s) expected[s] = p[s] * kDraws;
    EXPECT_LT(ChiSquare(counts, expected),
              ChiSquareCritical(static_cast<int>(p.size()) - 1))
        << "d=" << d;
  }
}

TEST(DuchiMultiTest, OneDimensionMatchesScalarMechanism) {
  constexpr int kDraws = 200000;
  const double t = 0.3;
  RandomSource rng(5, 0);
  int positive = 0;
  for (int i = 0; i < kDraws; ++i) {
    positive += DuchiMulti(std::vector<double>{t}, Eps(1), rng)[0] > 0;
  }
  const double p = DuchiPositiveProbability(t, Eps(1));
  EXPECT_NEAR(positive / static_cast<double>(kDraws), p,
              4 * std::sqrt(p * (1 - p) / kDraws));
}

TEST(DuchiMultiTest, LargeDimensionIsUnbiased) {
  constexpr int kUsers = 20000;
  constexpr int kD = 90;
  std::vector<double> t(kD);
  for (int j = 0; j < kD; ++j) t[j] = std::sin(j);
  RandomSource rng(12, 0);
  std::vector<double> sums(kD, 0.0);
  for (int i = 0; i < kUsers; ++i) {
    const std::vector<double> out = DuchiMulti(t, Eps(2), rng);
    for (int j = 0; j < kD; ++j) sums[j] += out[j];
  }
  const double b = DuchiMultiParams::For(Eps(2), kD).b;
  for (int j = 0; j < kD; ++j) {
    // Var = B^2 - t^2 per coordinate; 4.5 standard errors over 90 checks.
    const double se = std::sqrt((b * b - t[j] * t[j]) / kUsers);
    EXPECT_NEAR(sums[j] / kUsers, t[j], 4.5 * se) << j;
  }
}

TEST(SamplingPlanTest, DistinctIndicesUniformlySpread) {
  constexpr int kD = 7;
  constexpr int kK = 3;
  constexpr int kPlans = 100000;
  RandomSource rng(2, 0);
  std::vector<double> counts(kD, 0.0);
  for (int i = 0; i < kPlans; ++i) {
    const SamplingPlan plan = SamplingPlan::Draw(kD, kK, rng);
    ASSERT_EQ(plan.indices.size(), static_cast<size_t>(kK));
    const std::set<int> unique(plan.indices.begin(), plan.indices.end());
    ASSERT_EQ(unique.size(), static_cast<size_t>(kK));
    for (int j : plan.indices) counts[j] += 1;
  }
  EXPECT_LT(ChiSquare(counts,
                      std::vector<double>(kD, kPlans * kK / double{kD})),
            ChiSquareCritical(kD - 1));
}

TEST(PerturbNumericMultiTest, OneDimensionIsTheBaseMechanism) {
  for (NumericBase base : {NumericBase::kPiecewise, NumericBase::kHybrid}) {
    const Perturber1d scalar(base == NumericBase::kPiecewise
                                 ? Mechanism1d::kPiecewise
                                 : Mechanism1d::kHybrid,
                             Eps(2));
    RandomSource r1(3, 3);
    RandomSource r2(3, 3);
    for (int i = 0; i < 1000; ++i) {
      const double t = std::cos(i);
      ASSERT_EQ(PerturbNumericMulti(std::vector<double>{t}, Eps(2), base, r1)[0],
                scalar(t, r2));
    }
  }
}

TEST(PerturbNumericMultiTest, SingleScaledCoordinate) {
  const std::vector<double> t(16, 0.5);
  const double c = PiecewiseParams::For(Eps(1)).c;
  RandomSource rng(6, 0);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> out =
        PerturbNumericMulti(t, Eps(1), NumericBase::kPiecewise, rng);
    int nonzero = 0;
    for (double v : out) {
      if (v != 0) {
        ++nonzero;
        ASSERT_LE(std::abs(v), 16 * c);
      }
    }
    ASSERT_EQ(nonzero, 1);
  }
}

TEST(PerturbNumericMultiTest, CoordinatesAreUnbiased) {
  constexpr int kUsers = 1000000;
  constexpr int kD = 16;
  const std::vector<double> t(kD, 0.5);
  RandomSource rng(8, 0);
  std::vector<double> sums(kD, 0.0);
  for (int i = 0; i < kUsers; ++i) {
    RandomSource user = rng.Derive(i);
    const std::vector<double> out =
        PerturbNumericMulti(t, Eps(1), NumericBase::kPiecewise, user);
    for (int j = 0; j < kD; ++j) sums[j] += out[j];
  }
  // Per-coordinate variance (d/k)(Var_P(t) + t^2) - t^2 with k = 1.
  const double h = std::exp(0.5);
  const double var_p = 0.25 / (h - 1) + (h + 3) / (3 * (h - 1) * (h - 1));
  const double var = kD * (var_p + 0.25) - 0.25;
  for (int j = 0; j < kD; ++j) {
    EXPECT_NEAR(sums[j] / kUsers, 0.5, 4 * std::sqrt(var / kUsers)) << j;
  }
}

TEST(OueTest, ParametersAndPrivacyRatio) {
  for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const OueParams p = OueParams::For(Eps(eps));
    EXPECT_EQ(p.p, 0.5);
    EXPECT_NEAR(p.q, 1 / (std::exp(eps) + 1), 1e-15);
    // Worst ratio across two inputs differing in which bit is hot.
    const double ratio = (p.p / p.q) * ((1 - p.q) / (1 - p.p));
    EXPECT_LE(ratio, std::exp(eps) * (1 + 1e-9));
    EXPECT_NEAR(ratio, std::exp(eps), 1e-9 * std::exp(eps));
  }
}

TEST(OueTest, ExpectedOneCount) {
  const OueParams p = OueParams::For(Eps(1));
  EXPECT_NEAR(p.p + 9 * p.q, 0.5 + 9 / (std::exp(1.0) + 1), 1e-12);
  EXPECT_NEAR(p.p + 9 * p.q, 2.92047, 1e-5);
  constexpr int kDraws = 100000;
  RandomSource rng(10, 0);
  std::vector<double> counts;
  for (int i = 0; i < kDraws; ++i) {
    const std::vector<uint8_t> bits = OuePerturb(4, 10, Eps(1), rng);
    ASSERT_EQ(bits.size(), 10u);
    double ones = 0;
    for (uint8_t b : bits) ones += b;
    counts.push_back(ones);
  }
  const auto m = ComputeMoments(counts);
  EXPECT_NEAR(m.mean, p.p + 9 * p.q, 4 * m.standard_error);
}

TEST(OueTest, LargeBudgetKeepsOnlyTrueBit) {
  RandomSource rng(11, 0);
  int kept = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<uint8_t> bits = OuePerturb(2, 5, Eps(60), rng);
    for (int v = 0; v < 5; ++v) {
      if (v != 1) {
        ASSERT_EQ(bits[v], 0);
      }
    }
    kept += bits[1];
  }
  EXPECT_NEAR(kept / 1e4, 0.5, 4 * std::sqrt(0.25 / 1e4));
}

Schema MixedSchema() {
  return *Schema::Parse("x,numeric,10\nc,categorical,3\n");
}

TEST(RecordPerturberTest, TwoAttributesAtSmallBudget) {
  const Schema schema = MixedSchema();
  const RecordPerturber perturber(schema, Eps(1), NumericBase::kPiecewise);
  EXPECT_EQ(perturber.k(), 1);
  RandomSource rng(1, 0);
  Report report;
  constexpr int kUsers = 20000;
  int numeric = 0;
  for (int i = 0; i < kUsers; ++i) {
    ASSERT_THAT(perturber.Perturb(i, std::vector<double>{-5, 2}, rng, report),
                IsOk());
    ASSERT_EQ(report.entries.size(), 1u);
    numeric += !report.entries[0].categorical;
  }
  EXPECT_NEAR(numeric / double{kUsers}, 0.5, 4 * std::sqrt(0.25 / kUsers));
}

TEST(RecordPerturberTest, LargeBudgetReportsEverythingAtHalf) {
  const Schema schema = MixedSchema();
  const RecordPerturber perturber(schema, Eps(6), NumericBase::kHybrid);
  EXPECT_EQ(perturber.k(), 2);
  EXPECT_DOUBLE_EQ(perturber.attribute_budget().epsilon(), 3);
  RandomSource rng(1, 0);
  absl::StatusOr<Report> report = PerturbRecord(
      9, std::vector<double>{1, 3}, schema, Eps(6), NumericBase::kHybrid, rng);
  ASSERT_THAT(report, IsOk());
  EXPECT_EQ(report->user_id, 9);
  ASSERT_EQ(report->entries.size(), 2u);
  EXPECT_NE(report->entries[0].attribute, report->entries[1].attribute);
}

TEST(RecordPerturberTest, RejectsNonConformingTuple) {
  RandomSource rng(1, 0);
  EXPECT_THAT(PerturbRecord(0, std::vector<double>{11, 1}, MixedSchema(),
                            Eps(1), NumericBase::kPiecewise, rng),
              StatusIs(absl::StatusCode::kOutOfRange, HasSubstr("'x'")));
  EXPECT_THAT(PerturbRecord(0, std::vector<double>{1}, MixedSchema(), Eps(1),
                            NumericBase::kPiecewise, rng),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(RecordPerturberTest, SampledIndicesPassChiSquare) {
  std::vector<AttributeSpec> specs;
  for (int j = 0; j < 8; ++j) {
    specs.push_back(j % 2 ? AttributeSpec::Categorical("c" + std::to_string(j), 4)
                          : AttributeSpec::Numeric("x" + std::to_string(j), 1));
  }
  const Schema schema = *Schema::Create(specs);
  const RecordPerturber perturber(schema, Eps(5), NumericBase::kPiecewise);
  ASSERT_EQ(perturber.k(), 2);
  const std::vector<double> row = {0.1, 1, -0.2, 2, 0.3, 3, -0.4, 4};
  const double c = PiecewiseParams::For(Eps(2.5)).c;
  RandomSource rng(77, 0);
  Report report;
  std::vector<double> counts(8, 0.0);
  constexpr int kReports = 100000;
  for (int i = 0; i < kReports; ++i) {
    ASSERT_THAT(perturber.Perturb(i, row, rng, report), IsOk());
    ASSERT_EQ(report.entries.size(), 2u);
    ASSERT_NE(report.entries[0].attribute, report.entries[1].attribute);
    for (const ReportEntry& e : report.entries) {
      counts[e.attribute] += 1;
      if (!e.categorical) {
        ASSERT_LE(std::abs(e.numeric), c * 8 / 2);
      }
    }
  }
  EXPECT_LT(ChiSquare(counts, std::vector<double>(8, kReports * 2 / 8.0)),
            ChiSquareCritical(7));
}

TEST(ReportSerializationTest, RoundTrip) {
  const Schema schema = MixedSchema();
  RandomSource rng(4, 0);
  std::vector<Report> reports;
  for (int i = 0; i < 50; ++i) {
    reports.push_back(*PerturbRecord(i, std::vector<double>{2.5, 1.0 + i % 3},
                                     schema, Eps(6), NumericBase::kPiecewise,
                                     rng));
  }
  const std::string text = SerializeReports(reports);
  absl::StatusOr<std::vector<Report>> parsed = ParseReports(text, schema);
  ASSERT_THAT(parsed, IsOk());
  EXPECT_EQ(SerializeReports(*parsed), text);
  ASSERT_EQ(parsed->size(), reports.size());
  EXPECT_EQ((*parsed)[3].entries.size(), 2u);
}

TEST(ReportSerializationTest, WireFormat) {
  Report report;
  report.user_id = 7;
  report.entries.push_back({0, false, -1.5, {}});
  report.entries.push_back({1, true, 0, {0, 1, 1}});
  EXPECT_EQ(SerializeReports(std::vector<Report>{report}),
            "7,1,N,-1.5\n7,2,C,011\n");
}

TEST(ReportSerializationTest, ParseErrors) {
  const Schema schema = MixedSchema();
  EXPECT_THAT(ParseReports("1,3,N,0.5\n", schema),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("out of range")));
  EXPECT_THAT(ParseReports("1,1,C,010\n", schema),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ParseReports("1,2,C,01\n", schema),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ParseReports("1,2,C,012\n", schema),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ParseReports("1,1,N,0.5\n1,1,N,0.2\n", schema),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("duplicate")));
  EXPECT_THAT(ParseReports("1,1,X,0.5\n", schema),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

}  // namespace
}  // namespace ldp
