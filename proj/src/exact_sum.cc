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

#include <cmath>
#include <cstring>

namespace ldp {

void ExactSum::Add(double value) {
  if (!std::isfinite(value)) {
    non_finite_ = true;
    return;
  }
  if (value == 0) return;
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  const bool negative = (bits >> 63) != 0;
  const int biased_exponent = static_cast<int>((bits >> 52) & 0x7ff);
  uint64_t mantissa = bits & ((uint64_t{1} << 52) - 1);
  int position;  // Weight of the mantissa's lowest bit, as a power of 2^-1074.
  if (biased_exponent == 0) {
    position = 0;
  } else {
    mantissa |= uint64_t{1} << 52;
    position = biased_exponent - 1;
  }
  const int limb = position / 32;
  const int shift = position % 32;
  const unsigned __int128 wide = static_cast<unsigned __int128>(mantissa)
                                 << shift;
  const int64_t digits[3] = {static_cast<int64_t>(wide & 0xffffffffu),
                             static_cast<int64_t>((wide >> 32) & 0xffffffffu),
                             static_cast<int64_t>(wide >> 64)};
  for (int i = 0; i < 3; ++i) {
    limbs_[limb + i] += negative ? -digits[i] : digits[i];
  }
  if (++pending_ >= kCarryInterval) Normalize();
}

void ExactSum::Merge(const ExactSum& other) {
  ExactSum copy = other;
  copy.Normalize();
  Normalize();
  for (int i = 0; i < kLimbs; ++i) limbs_[i] += copy.limbs_[i];
  non_finite_ = non_finite_ || other.non_finite_;
  pending_ = 1;
  Normalize();
}

// Canonical form: limbs 0..kLimbs-2 in [0, 2^32); the top limb is signed.
void ExactSum::Normalize() {
  int64_t carry = 0;
  for (int i = 0; i < kLimbs - 1; ++i) {
    const int64_t v = limbs_[i] + carry;
    // Arithmetic shift floors, so the remainder lands in [0, 2^32).
    carry = v >> 32;
    limbs_[i] = v - (carry << 32);
  }
  limbs_[kLimbs - 1] += carry;
  pending_ = 0;
}

double ExactSum::Value() const {
  if (non_finite_) return std::nan("");
  ExactSum canonical = *this;
  canonical.Normalize();
  std::array<int64_t, kLimbs>& limbs = canonical.limbs_;
  const bool negative = limbs[kLimbs - 1] < 0;
  if (negative) {
    // Two's-complement negation over base-2^32 digits.
    int64_t borrow = 0;
    for (int i = 0; i < kLimbs - 1; ++i) {
      int64_t v = -limbs[i] - borrow;
      borrow = 0;
      if (v < 0) {
        v += int64_t{1} << 32;
        borrow = 1;
      }
      limbs[i] = v;
    }
    limbs[kLimbs - 1] = -limbs[kLimbs - 1] - borrow;
  }
  int top = kLimbs - 1;
  while (top >= 0 && limbs[top] == 0) --top;
  if (top < 0) return 0.0;
  // The top three digits carry at least 65 significant bits; lower digits
  // only matter as a sticky bit for rounding.
  long double magnitude = 0;
  for (int i = top; i >= 0 && i >= top - 2; --i) {
    magnitude = magnitude * 4294967296.0L + static_cast<long double>(limbs[i]);
  }
  bool sticky = false;
  for (int i = top - 3; i >= 0; --i) sticky = sticky || limbs[i] != 0;
  const int low = top >= 2 ? top - 2 : 0;
  if (sticky) magnitude += 0.25L;
  const double result =
      static_cast<double>(std::ldexp(magnitude, 32 * low - 1074));
  return negative ? -result : result;
}

bool ExactSum::operator==(const ExactSum& other) const {
  ExactSum a = *this;
  ExactSum b = other;
  a.Normalize();
  b.Normalize();
  return a.non_finite_ == b.non_finite_ && a.limbs_ == b.limbs_;
}

}  // namespace ldp
