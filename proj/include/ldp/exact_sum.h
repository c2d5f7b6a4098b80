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

// Order-independent exact summation of doubles.
//
// Every finite double is an integer multiple of 2^-1074, so a wide
// fixed-point integer holds any partial sum without rounding. Two
// accumulators that received the same multiset of values compare equal and
// convert to the same double, whatever the insertion or merge order.

#ifndef LDP_EXACT_SUM_H_
#define LDP_EXACT_SUM_H_

#include <array>
#include <cstdint>

namespace ldp {

class ExactSum {
 public:
  ExactSum() { limbs_.fill(0); }

  void Add(double value);
  void Merge(const ExactSum& other);

  // Nearest-or-adjacent double to the exact sum; NaN if any non-finite value
  // was added. Depends only on the exact sum.
  double Value() const;

  bool operator==(const ExactSum& other) const;

 private:
  // 32-bit digits stored in int64 limbs. Bit 0 of limb 0 has weight 2^-1074.
  static constexpr int kLimbs = 68;
  // Pending additions per limb before carries must be propagated.
  static constexpr int64_t kCarryInterval = int64_t{1} << 30;

  void Normalize();

  std::array<int64_t, kLimbs> limbs_;
  int64_t pending_ = 0;
  bool non_finite_ = false;
};

}  // namespace ldp

#endif  // LDP_EXACT_SUM_H_
