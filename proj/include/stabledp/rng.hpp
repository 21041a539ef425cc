// Copyright 2026 The stabledp Authors
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

#ifndef STABLEDP_RNG_HPP
#define STABLEDP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace stabledp {

// Purpose tags for derived sub-streams. A chain step derives one stream per
// purpose so that changing e.g. the replica count never perturbs the draws of
// earlier replicas or of other purposes.
enum class Stream : std::uint64_t {
  kBatch = 1,
  kNoise = 2,
  kSubordinator = 3,
  kChain = 4,
  kGrid = 5,
  kData = 6,
};

// Counter-based splittable random stream (SplitMix64 core). A stream is a
// value type: copying it forks the sequence, derive() creates a statistically
// independent child keyed by an integer tag. All draws are a pure function of
// (key, counter), which makes every consumer reproducible and safe to run
// concurrently on independent streams.
class RngStream {
 public:
  RngStream() : key_(mix(0x853c49e6748fea9bULL)) {}
  explicit RngStream(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

  RngStream derive(std::uint64_t tag) const {
    RngStream child;
    child.key_ = mix(key_ ^ mix(tag * kGolden + 0x2545f4914f6cdd1dULL));
    return child;
  }
  RngStream derive(Stream purpose) const {
    return derive(0xd6e8feb86659fd93ULL + static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe for logs and reciprocals.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the spare is cached on the stream.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_open()));
    const double t = 6.283185307179586476925286766559 * next_double();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  // Unit-rate exponential.
  double next_exponential() { return -std::log(next_open()); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stabledp

#endif  // STABLEDP_RNG_HPP
