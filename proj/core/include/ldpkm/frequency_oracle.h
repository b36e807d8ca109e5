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

// Frequency oracle: unary randomized response over a hashed domain.
//
// The domain {0, ..., domain_size - 1} is mapped to min(domain_size, max_bins)
// bins (identity when it fits, otherwise a seeded 2-universal multiply-shift
// hash). A user holding item x one-hot encodes bin(x) (all zeros for the null
// item) and flips each bit independently with probability
// q = 1 / (1 + e^{epsilon/2}). Two inputs differ in at most two bits, so the
// likelihood ratio of any report is at most ((1-q)/q)^2 = e^epsilon.

#ifndef LDPKM_FREQUENCY_ORACLE_H_
#define LDPKM_FREQUENCY_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/rng.h"

namespace ldpkm {

// The item of a user who holds nothing for the query.
inline constexpr uint64_t kNullItem = ~uint64_t{0};
inline constexpr uint32_t kDefaultMaxBins = 1u << 16;

struct FrequencyOracleConfig {
  uint64_t domain_size = 1;
  double epsilon = 1.0;
  uint64_t hash_seed = 0;
  uint32_t max_bins = kDefaultMaxBins;  // power of two
  // Debug: no flipping. Never private.
  bool noise_off = false;

  friend bool operator==(const FrequencyOracleConfig&,
                         const FrequencyOracleConfig&) = default;
};

// Maps domain items to bins.
class BinMap {
 public:
  BinMap() = default;
  BinMap(uint64_t domain_size, uint32_t max_bins, uint64_t hash_seed);

  uint32_t num_bins() const { return num_bins_; }
  bool hashed() const { return shift_ != 0; }
  // kNullItem has no bin; callers must filter it.
  uint32_t operator()(uint64_t item) const;

 private:
  uint32_t num_bins_ = 1;
  int shift_ = 0;
  unsigned __int128 mult_ = 0;
  unsigned __int128 add_ = 0;
};

// One user's report: num_bins bits.
struct UnaryReport {
  uint64_t config_tag = 0;
  uint32_t num_bins = 0;
  std::vector<uint64_t> words;

  bool bit(uint32_t j) const { return (words[j >> 6] >> (j & 63)) & 1; }
  std::vector<uint8_t> Serialize() const;
  static absl::StatusOr<UnaryReport> Parse(std::span<const uint8_t> bytes);
};

class FrequencyEstimate {
 public:
  FrequencyEstimate(BinMap bins, std::vector<double> estimates, uint64_t n,
                    double epsilon, double beta);

  // Estimate for a domain item (the estimate of its bin).
  double operator()(uint64_t item) const { return estimates_[bins_(item)]; }
  double bin_estimate(uint32_t bin) const { return estimates_[bin]; }
  const std::vector<double>& bin_estimates() const { return estimates_; }
  const BinMap& bin_map() const { return bins_; }
  uint64_t population() const { return n_; }
  double epsilon() const { return epsilon_; }
  double beta() const { return beta_; }
  // (3 / epsilon) * sqrt(n * ln(4 / beta)).
  double error_bound() const { return error_bound_; }

 private:
  BinMap bins_;
  std::vector<double> estimates_;
  uint64_t n_;
  double epsilon_;
  double beta_;
  double error_bound_;
};

double FrequencyErrorBound(double epsilon, uint64_t n, double beta);

class UnaryFrequencyOracle {
 public:
  static absl::StatusOr<UnaryFrequencyOracle> Create(
      const FrequencyOracleConfig& config);

  const FrequencyOracleConfig& config() const { return config_; }
  const BinMap& bin_map() const { return bins_; }
  uint32_t num_bins() const { return bins_.num_bins(); }
  uint64_t config_tag() const { return tag_; }
  // 0 in noise-off mode.
  double flip_probability() const { return q_; }

  UnaryReport Encode(uint64_t item, Rng& rng) const;
  // Probability that Encode(item) returns exactly `report`.
  double ReportProbability(uint64_t item, const UnaryReport& report) const;

  // Sums reports bitwise. Refuses reports from another configuration.
  absl::StatusOr<std::vector<uint64_t>> CountOnes(
      std::span<const UnaryReport> reports) const;
  FrequencyEstimate EstimateFromOnes(std::span<const uint64_t> ones,
                                     uint64_t n, double beta) const;
  absl::StatusOr<FrequencyEstimate> Aggregate(
      std::span<const UnaryReport> reports, double beta) const;

  // Samples the per-bin ones counts that encoding the users' items would
  // produce, without materializing reports: for a bin with true count f out
  // of n users, ones = Bin(f, 1 - q) + Bin(n - f, q). Same distribution as
  // CountOnes over Encode.
  std::vector<uint64_t> SampleOnes(std::span<const uint64_t> bin_counts,
                                   uint64_t n, Rng& rng) const;
  // Per-bin true counts of items (null items skipped).
  std::vector<uint64_t> BinCounts(std::span<const uint64_t> items) const;

 private:
  UnaryFrequencyOracle(FrequencyOracleConfig config, BinMap bins, double q,
                       uint64_t tag)
      : config_(config), bins_(bins), q_(q), tag_(tag) {}

  FrequencyOracleConfig config_;
  BinMap bins_;
  double q_;
  uint64_t tag_;
};

}  // namespace ldpkm

#endif  // LDPKM_FREQUENCY_ORACLE_H_
