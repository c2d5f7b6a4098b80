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


#include "ldp/random.h"

#include <cmath>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "stats_util.h"

namespace ldp {
namespace {

using ::ldp::testing::ChiSquare;
using ::ldp::testing::ChiSquareCritical;
using ::ldp::testing::ComputeMoments;
using ::ldp::testing::KsCritical;
using ::ldp::testing::KsStatistic;
using ::testing::ElementsAre;

// Published Philox4x32-10 known-answer vectors.
TEST(PhiloxTest, ZeroCounterZeroKey) {
  EXPECT_THAT(Philox4x32({0, 0, 0, 0}, {0, 0}),
              ElementsAre(0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u));
}

TEST(PhiloxTest, AllOnes) {
  EXPECT_THAT(Philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu}),
              ElementsAre(0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu));
}

TEST(PhiloxTest, PiDigits) {
  EXPECT_THAT(Philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u}),
              ElementsAre(0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u));
}

TEST(RandomSourceTest, SameSeedAndStreamReproduce) {
  RandomSource a(42, 7);
  RandomSource b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RandomSourceTest, DistinctStreamsDiffer) {
  RandomSource a(42, 7);
  RandomSource b(42, 8);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a.NextU64() == b.NextU64();
  EXPECT_EQ(equal, 0);
}

TEST(RandomSourceTest, DeriveIsDeterministicAndDistinct) {
  const RandomSource root(1, 2);
  RandomSource c1 = root.Derive(5);
  RandomSource c2 = root.Derive(5);
  EXPECT_EQ(c1.stream(), c2.stream());
  EXPECT_EQ(c1.NextU64(), c2.NextU64());
  std::set<uint64_t> streams;
  for (uint64_t i = 0; i < 10000; ++i) streams.insert(root.Derive(i).stream());
  EXPECT_EQ(streams.size(), 10000u);
}

TEST(RandomSourceTest, UniformStaysInRange) {
  RandomSource rng(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double open = rng.UniformOpen();
    ASSERT_GT(open, 0.0);
    ASSERT_LT(open, 1.0);
  }
}

TEST(RandomSourceTest, UniformPassesKs) {
  RandomSource rng(11, 0);
  std::vector<double> xs(100000);
  for (double& x : xs) x = rng.Uniform();
  EXPECT_LT(KsStatistic(xs, [](double x) { return x; }),
            KsCritical(0.001, xs.size()));
}

TEST(RandomSourceTest, UniformIntIsUniform) {
  RandomSource rng(5, 1);
  constexpr int kBins = 7;
  constexpr int kDraws = 70000;
  std::vector<double> counts(kBins, 0);
  for (int i = 0; i < kDraws; ++i) {
    const uint64_t v = rng.UniformInt(kBins);
    ASSERT_LT(v, static_cast<uint64_t>(kBins));
    counts[v] += 1;
  }
  EXPECT_LT(ChiSquare(counts, std::vector<double>(kBins, kDraws / kBins)),
            ChiSquareCritical(kBins - 1));
}

TEST(RandomSourceTest, NormalMoments) {
  RandomSource rng(9, 0);
  std::vector<double> xs(200000);
  for (double& x : xs) x = rng.Normal();
  const auto m = ComputeMoments(xs);
  EXPECT_NEAR(m.mean, 0.0, 4 * m.standard_error);
  // Sample variance of n normals has sd sqrt(2 / n).
  EXPECT_NEAR(m.variance, 1.0, 4 * std::sqrt(2.0 / xs.size()));
}

TEST(RandomSourceTest, BernoulliFrequency) {
  RandomSource rng(13, 0);
  constexpr int kDraws = 100000;
  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += rng.Bernoulli(0.3);
  EXPECT_NEAR(ones / static_cast<double>(kDraws), 0.3,
              4 * std::sqrt(0.3 * 0.7 / kDraws));
}

TEST(MixBitsTest, SplitMixFinalizerVector) {
  // First SplitMix64 output from state 0.
  EXPECT_EQ(MixBits(0), 0xe220a8397b1dcdafull);
}

}  // namespace
}  // namespace ldp
