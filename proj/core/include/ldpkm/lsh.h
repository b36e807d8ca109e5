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

// Euclidean locality-sensitive hashing by concatenated Gaussian projections.
//
// A base function is x -> floor((<g, x> + u) / w) with g standard normal and
// u uniform on [0, w). Two points at distance s collide with probability
// P(w / s) where
//   P(t) = 1 - 2 Phi(-t) - 2 / (sqrt(2 pi) t) * (1 - exp(-t^2 / 2)).
// K independent base functions are concatenated and the K-tuple is
// compressed into [0, 2^bits) with 2^bits <= n^3 (bits <= 63) by a
// multiply-shift hash.

#ifndef LDPKM_LSH_H_
#define LDPKM_LSH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/rng.h"

namespace ldpkm {

struct LshSpec {
  size_t dim = 0;
  uint64_t n = 0;
  double r = 0.0;
  double c = 0.0;
  double p_target = 0.0;  // n^{-b} unless relaxed
  double q_target = 0.0;  // n^{-2-a} unless relaxed
  double a = 0.0;
  double b = 0.0;
  uint32_t K = 1;
  double width = 0.0;
  uint32_t universe_bits = 1;
  bool relaxed = false;

  uint64_t universe() const;
  // Closed-form amplified collision probability at the given distance.
  double CollisionProbability(double distance) const;
};

double BaseCollisionProbability(double distance, double width);

struct FamilyOptions {
  // The width is solved so that the closed-form p(r) is
  // p_target * (1 + p_margin), leaving room for sampling error.
  double p_margin = 0.05;
  uint32_t max_k = 64;
  // Refuse when the best achievable c exceeds this.
  double max_c = 1e4;

  friend bool operator==(const FamilyOptions&, const FamilyOptions&) = default;
};

// Chooses (K, w) minimizing c subject to p(r) >= n^{-b} and
// q(cr) <= n^{-2-a}. Refuses (FAILED_PRECONDITION) when infeasible.
absl::StatusOr<LshSpec> BuildFamily(size_t d, uint64_t n, double r, double a,
                                    double b, const FamilyOptions& options = {});
// Same search with the two targets given directly.
absl::StatusOr<LshSpec> BuildRelaxedFamily(size_t d, uint64_t n, double r,
                                           double p_target, double q_target,
                                           const FamilyOptions& options = {});

class HashFunction {
 public:
  HashFunction() = default;
  static HashFunction Sample(const LshSpec& spec, Rng& rng);

  size_t dim() const { return dim_; }
  uint32_t K() const { return K_; }
  double width() const { return width_; }
  uint64_t universe() const { return uint64_t{1} << bits_; }
  uint32_t universe_bits() const { return bits_; }

  // The K raw bucket indices.
  std::vector<int64_t> Buckets(std::span<const double> x) const;
  // Compressed value in [0, 2^bits).
  uint64_t operator()(std::span<const double> x) const;
  uint64_t Compress(std::span<const int64_t> buckets) const;

  // Self-describing blob tagged "LSH1".
  std::vector<uint8_t> Serialize() const;
  static absl::StatusOr<HashFunction> Deserialize(std::span<const uint8_t> blob);

  friend bool operator==(const HashFunction&, const HashFunction&) = default;

 private:
  size_t dim_ = 0;
  uint32_t K_ = 0;
  double width_ = 1.0;
  uint32_t bits_ = 1;
  std::vector<double> directions_;  // K x dim
  std::vector<double> offsets_;     // K
  uint64_t tuple_base_ = 0;
  uint64_t mult_hi_ = 0, mult_lo_ = 0, add_hi_ = 0, add_lo_ = 0;
};

struct CollisionEstimate {
  uint64_t collisions = 0;
  uint64_t trials = 0;
  double estimate = 0.0;
  double low = 0.0;   // 95% Wilson interval
  double high = 0.0;
};

// Wilson score interval.
CollisionEstimate MakeEstimate(uint64_t successes, uint64_t trials,
                               double z = 1.959963984540054);

// Samples a fresh function per trial and hashes two points at exactly the
// given distance (random direction). compressed=false compares raw K-tuples.
CollisionEstimate EstimateCollision(const LshSpec& spec, double distance,
                                    uint64_t trials, Rng& rng,
                                    bool compressed = true);
// counts[k] = number of trials where the first k + 1 base functions collide.
std::vector<uint64_t> CollisionProfile(const LshSpec& spec, double distance,
                                       uint64_t trials, Rng& rng);

}  // namespace ldpkm

#endif  // LDPKM_LSH_H_
