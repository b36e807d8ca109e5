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

#include "ldpkm/frequency_oracle.h"

#include <bit>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "ldpkm/bytes.h"

namespace ldpkm {

BinMap::BinMap(uint64_t domain_size, uint32_t max_bins, uint64_t hash_seed) {
  if (domain_size <= max_bins) {
    num_bins_ = static_cast<uint32_t>(std::max<uint64_t>(domain_size, 1));
    return;
  }
  num_bins_ = max_bins;
  shift_ = 128 - std::countr_zero(max_bins);
  Rng rng(hash_seed);
  const uint64_t m_hi = rng.NextU64(), m_lo = rng.NextU64();
  const uint64_t a_hi = rng.NextU64(), a_lo = rng.NextU64();
  mult_ = (static_cast<unsigned __int128>(m_hi) << 64) | m_lo;
  add_ = (static_cast<unsigned __int128>(a_hi) << 64) | a_lo;
}

uint32_t BinMap::operator()(uint64_t item) const {
  if (shift_ == 0) return static_cast<uint32_t>(item);
  return static_cast<uint32_t>((mult_ * item + add_) >> shift_);
}

std::vector<uint8_t> UnaryReport::Serialize() const {
  ByteWriter w;
  w.U64(config_tag);
  w.U32(num_bins);
  for (uint64_t word : words) w.U64(word);
  return w.Take();
}

absl::StatusOr<UnaryReport> UnaryReport::Parse(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  UnaryReport rep;
  rep.config_tag = r.U64();
  rep.num_bins = r.U32();
  rep.words.resize((rep.num_bins + 63) / 64);
  for (auto& w : rep.words) w = r.U64();
  if (!r.ok() || !r.done()) return absl::InvalidArgumentError("bad unary report");
  return rep;
}

double FrequencyErrorBound(double epsilon, uint64_t n, double beta) {
  return 3.0 / epsilon * std::sqrt(static_cast<double>(n) * std::log(4.0 / beta));
}

FrequencyEstimate::FrequencyEstimate(BinMap bins, std::vector<double> estimates,
                                     uint64_t n, double epsilon, double beta)
    : bins_(bins),
      estimates_(std::move(estimates)),
      n_(n),
      epsilon_(epsilon),
      beta_(beta),
      error_bound_(FrequencyErrorBound(epsilon, n, beta)) {}

absl::StatusOr<UnaryFrequencyOracle> UnaryFrequencyOracle::Create(
    const FrequencyOracleConfig& config) {
  if (!(config.epsilon > 0.0) || std::isnan(config.epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (config.domain_size == 0) {
    return absl::InvalidArgumentError("empty domain");
  }
  if (config.max_bins == 0 || !std::has_single_bit(config.max_bins)) {
    return absl::InvalidArgumentError("max_bins must be a power of two");
  }
  BinMap bins(config.domain_size, config.max_bins, config.hash_seed);
  const double q =
      config.noise_off ? 0.0 : 1.0 / (1.0 + std::exp(config.epsilon / 2.0));
  uint64_t tag = Mix64(config.domain_size ^ Mix64(config.hash_seed));
  tag = Mix64(tag ^ std::bit_cast<uint64_t>(config.epsilon));
  tag = Mix64(tag ^ config.max_bins ^ (config.noise_off ? 0x5a5a : 0));
  return UnaryFrequencyOracle(config, bins, q, tag);
}

UnaryReport UnaryFrequencyOracle::Encode(uint64_t item, Rng& rng) const {
  UnaryReport rep;
  rep.config_tag = tag_;
  rep.num_bins = num_bins();
  rep.words.assign((rep.num_bins + 63) / 64, 0);
  const int64_t hot = item == kNullItem ? -1 : static_cast<int64_t>(bins_(item));
  for (uint32_t j = 0; j < rep.num_bins; ++j) {
    bool b = static_cast<int64_t>(j) == hot;
    if (q_ > 0.0 && rng.Bernoulli(q_)) b = !b;
    if (b) rep.words[j >> 6] |= uint64_t{1} << (j & 63);
  }
  return rep;
}

double UnaryFrequencyOracle::ReportProbability(uint64_t item,
                                               const UnaryReport& report) const {
  const int64_t hot = item == kNullItem ? -1 : static_cast<int64_t>(bins_(item));
  double prob = 1.0;
  for (uint32_t j = 0; j < report.num_bins; ++j) {
    const bool input = static_cast<int64_t>(j) == hot;
    prob *= report.bit(j) == input ? 1.0 - q_ : q_;
  }
  return prob;
}

absl::StatusOr<std::vector<uint64_t>> UnaryFrequencyOracle::CountOnes(
    std::span<const UnaryReport> reports) const {
  std::vector<uint64_t> ones(num_bins(), 0);
  for (const auto& rep : reports) {
    if (rep.config_tag != tag_ || rep.num_bins != num_bins()) {
      return absl::InvalidArgumentError(
          "report was produced under a different oracle configuration");
    }
    for (uint32_t j = 0; j < rep.num_bins; ++j) ones[j] += rep.bit(j);
  }
  return ones;
}

FrequencyEstimate UnaryFrequencyOracle::EstimateFromOnes(
    std::span<const uint64_t> ones, uint64_t n, double beta) const {
  std::vector<double> est(num_bins(), 0.0);
  const double nq = static_cast<double>(n) * q_;
  const double scale = 1.0 / (1.0 - 2.0 * q_);
  for (uint32_t j = 0; j < num_bins(); ++j) {
    est[j] = (static_cast<double>(ones[j]) - nq) * scale;
  }
  return FrequencyEstimate(bins_, std::move(est), n, config_.epsilon, beta);
}

absl::StatusOr<FrequencyEstimate> UnaryFrequencyOracle::Aggregate(
    std::span<const UnaryReport> reports, double beta) const {
  auto ones = CountOnes(reports);
  if (!ones.ok()) return ones.status();
  return EstimateFromOnes(*ones, reports.size(), beta);
}

std::vector<uint64_t> UnaryFrequencyOracle::BinCounts(
    std::span<const uint64_t> items) const {
  std::vector<uint64_t> counts(num_bins(), 0);
  for (uint64_t x : items) {
    if (x != kNullItem) ++counts[bins_(x)];
  }
  return counts;
}

std::vector<uint64_t> UnaryFrequencyOracle::SampleOnes(
    std::span<const uint64_t> bin_counts, uint64_t n, Rng& rng) const {
  std::vector<uint64_t> ones(num_bins());
  if (q_ == 0.0) {
    for (uint32_t j = 0; j < num_bins(); ++j) ones[j] = bin_counts[j];
    return ones;
  }
  // Empty bins share one distribution object; they are the common case.
  std::binomial_distribution<uint64_t> empty_bin(n, q_);
  for (uint32_t j = 0; j < num_bins(); ++j) {
    const uint64_t f = bin_counts[j];
    if (f == 0) {
      ones[j] = empty_bin(rng);
    } else {
      ones[j] = rng.Binomial(f, 1.0 - q_) + rng.Binomial(n - f, q_);
    }
  }
  return ones;
}

}  // namespace ldpkm
