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

#ifndef LDP_RANDOM_H_
#define LDP_RANDOM_H_

#include <array>
#include <cstdint>

namespace ldp {

// Philox4x32-10 block function. Exposed for known-answer testing.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Counter-based random source keyed by (seed, stream id).
//
// The i-th 64-bit draw of a source is a pure function of (seed, stream, i),
// so two sources built from the same pair produce identical sequences on
// every platform. Distinct stream ids address disjoint counter ranges of the
// same keyed permutation and are statistically independent. A source is
// single-owner; give each user or worker its own via Derive().
class RandomSource {
 public:
  RandomSource(uint64_t seed, uint64_t stream);

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

  // Child source for a sub-task (e.g. user index). The child's stream id is
  // a hash of (this stream, child), so derivation chains stay deterministic.
  RandomSource Derive(uint64_t child) const;

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  // Uniform on (0, 1); never returns 0 or 1.
  double UniformOpen();
  double UniformIn(double lo, double hi);
  bool Bernoulli(double p);
  // Uniform integer in [0, n). Requires n > 0.
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller on this source's own uniforms.
  double Normal();

 private:
  void Refill();

  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
  std::array<uint64_t, 2> buffer_{};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64 finalizer; used for stream derivation.
uint64_t MixBits(uint64_t x);

}  // namespace ldp

#endif  // LDP_RANDOM_H_
