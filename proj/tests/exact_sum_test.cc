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


#include "ldp/exact_sum.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "ldp/random.h"

namespace ldp {
namespace {

TEST(ExactSumTest, EmptyIsZero) { EXPECT_EQ(ExactSum().Value(), 0.0); }

TEST(ExactSumTest, CancelsCatastrophically) {
  ExactSum s;
  s.Add(1e100);
  s.Add(1.0);
  s.Add(-1e100);
  EXPECT_EQ(s.Value(), 1.0);
}

TEST(ExactSumTest, HandlesSubnormalsAndExtremes) {
  const double tiny = std::numeric_limits<double>::denorm_min();
  const double huge = std::numeric_limits<double>::max();
  ExactSum s;
  s.Add(tiny);
  s.Add(tiny);
  EXPECT_EQ(s.Value(), 2 * tiny);
  ExactSum t;
  t.Add(huge);
  t.Add(-huge);
  t.Add(-0.5);
  EXPECT_EQ(t.Value(), -0.5);
  ExactSum u;
  u.Add(huge);
  EXPECT_EQ(u.Value(), huge);
}

TEST(ExactSumTest, NonFiniteGivesNan) {
  ExactSum s;
  s.Add(1);
  s.Add(std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(s.Value()));
}

TEST(ExactSumTest, IntegersSumExactly) {
  ExactSum s;
  double expected = 0;
  for (int i = -5000; i <= 10000; ++i) {
    s.Add(i);
    expected += i;
  }
  EXPECT_EQ(s.Value(), expected);
}

TEST(ExactSumTest, OrderAndShardingDoNotMatter) {
  RandomSource rng(4, 0);
  std::vector<double> xs(20000);
  for (double& x : xs) x = rng.Normal() * std::exp(rng.UniformIn(-40, 40));
  ExactSum forward;
  for (double x : xs) forward.Add(x);
  ExactSum backward;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) backward.Add(*it);
  ExactSum merged;
  for (int shard = 0; shard < 7; ++shard) {
    ExactSum part;
    for (size_t i = shard; i < xs.size(); i += 7) part.Add(xs[i]);
    merged.Merge(part);
  }
  EXPECT_TRUE(forward == backward);
  EXPECT_TRUE(forward == merged);
  EXPECT_EQ(forward.Value(), backward.Value());
  EXPECT_EQ(forward.Value(), merged.Value());
}

TEST(ExactSumTest, CloseToLongDoubleSum) {
  RandomSource rng(8, 0);
  ExactSum s;
  long double reference = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.UniformIn(-1, 1);
    s.Add(x);
    reference += x;
  }
  EXPECT_NEAR(s.Value(), static_cast<double>(reference), 1e-12);
}

}  // namespace
}  // namespace ldp
