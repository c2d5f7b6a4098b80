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

#include <cassert>
#include <cmath>
#include <numbers>

namespace ldp {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t product = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(product >> 32);
  lo = static_cast<uint32_t>(product);
}

inline std::array<uint32_t, 4> PhiloxRound(const std::array<uint32_t, 4>& c,
                                           const std::array<uint32_t, 2>& k) {
  uint32_t hi0, lo0, hi1, lo1;
  MulHiLo(kPhiloxM0, c[0], hi0, lo0);
  MulHiLo(kPhiloxM1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  counter = PhiloxRound(counter, key);
  for (int round = 1; round < 10; ++round) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    counter = PhiloxRound(counter, key);
  }
  return counter;
}

uint64_t MixBits(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(uint64_t seed, uint64_t stream)
    : seed_(seed), stream_(stream) {}

RandomSource RandomSource::Derive(uint64_t child) const {
  return RandomSource(seed_, MixBits(MixBits(stream_) ^ child));
}

void RandomSource::Refill() {
  const std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
      static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                       static_cast<uint32_t>(seed_ >> 32)};
  const std::array<uint32_t, 4> out = Philox4x32(ctr, key);
  ++counter_;
  buffer_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
}

uint64_t RandomSource::NextU64() {
  if (buffered_ == 0) Refill();
  return buffer_[2 - buffered_--];
}

double RandomSource::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RandomSource::UniformOpen() {
  // Midpoints of the 2^53 grid: (k + 0.5) / 2^53 is never 0 or 1.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::UniformIn(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

bool RandomSource::Bernoulli(double p) { return Uniform() < p; }

uint64_t RandomSource::UniformInt(uint64_t n) {
  assert(n > 0);
  // Lemire's multiply-shift with rejection of the biased low zone.
  unsigned __int128 m = static_cast<unsigned __int128>(NextU64()) * n;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < n) {
    const uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(NextU64()) * n;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

double RandomSource::Normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(UniformOpen()));
  const double angle = 2.0 * std::numbers::pi * Uniform();
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

}  // namespace ldp
