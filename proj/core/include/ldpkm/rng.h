//
// Copyright 2026 The ldpkm Authors
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

#ifndef LDPKM_RNG_H_
#define LDPKM_RNG_H_

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace ldpkm {

// 64-bit FNV-1a. Used to turn component names into stream ids.
uint64_t Fnv1a64(std::string_view bytes);

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Deterministic random stream (xoshiro256**).
//
// All randomness in a run flows from one root seed. A component obtains its
// own stream with Fork("name"), which depends only on the parent's stream id
// and the name, never on how many numbers the parent has already produced.
// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed);

  Rng Fork(std::string_view name) const;
  Rng Fork(uint64_t index) const;

  uint64_t stream_id() const { return stream_id_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform on {0, ..., bound - 1}; bound must be positive.
  uint64_t UniformInt(uint64_t bound);
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }
  uint64_t Binomial(uint64_t trials, double p);

  // Fisher-Yates.
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = UniformInt(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t stream_id_;
  uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ldpkm

#endif  // LDPKM_RNG_H_
