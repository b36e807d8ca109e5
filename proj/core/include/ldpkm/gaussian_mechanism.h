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

// Gaussian vector reports: private vector sums and per-region averages.

#ifndef LDPKM_GAUSSIAN_MECHANISM_H_
#define LDPKM_GAUSSIAN_MECHANISM_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/geometry.h"
#include "ldpkm/protocol.h"
#include "ldpkm/rng.h"

namespace ldpkm {

// Per-coordinate noise for a vector of L2 sensitivity 2 * lambda:
// 2 * lambda * sqrt(2 ln(1.25 / delta)) / epsilon.
double GaussianSumSigma(double lambda, double epsilon, double delta);
// 2 * lambda * sqrt(n d) * ln(2 / (beta delta)) / epsilon.
double GaussianSumBound(double lambda, uint64_t n, size_t d, double epsilon,
                        double delta, double beta);

// Every user reports x_i + N(0, sigma^2 I); the server adds the reports.
// user_ids index into points and must be ascending.
absl::StatusOr<std::vector<double>> GaussianSum(
    ProtocolSession& session, uint32_t round, const std::string& channel,
    const PointSet& points, std::span<const uint32_t> user_ids, double epsilon,
    double delta, Rng& rng);

// One cell of a partition. Every point of the cell lies within `radius` of
// `reference`, so the cell's diameter is at most 2 * radius. Cells may also
// carry an axis-aligned box (in the partition's frame) and a key.
struct Region {
  uint64_t key = 0;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> reference;
  double radius = 0.0;

  double diameter() const { return 2.0 * radius; }
};

class RegionPartition {
 public:
  using KeyFn = std::function<uint64_t(std::span<const double>)>;

  // Regions need positive radii; an empty partition is an error.
  static absl::StatusOr<RegionPartition> Create(std::vector<Region> regions,
                                                OrthonormalBasis frame = {},
                                                KeyFn key = nullptr);

  size_t size() const { return regions_.size(); }
  const Region& region(size_t t) const { return regions_[t]; }
  // First region whose key, box and ball all contain x; -1 if none.
  int64_t Locate(std::span<const double> x) const;
  bool Contains(size_t t, std::span<const double> x) const;

 private:
  std::vector<Region> regions_;
  OrthonormalBasis frame_;
  KeyFn key_;
};

struct LdpAvgParams {
  double epsilon = 1.0;
  double delta = 1e-6;
  double beta = 0.1;
  // sigma_t = sigma_multiplier * diam_t / epsilon * sqrt(ln(1.25 / delta)).
  // Users center their vector on the region's reference, which keeps the
  // mechanism private for any multiplier >= 2 sqrt(2).
  double sigma_multiplier = 8.0;
  // Regions with estimated count below
  // reliability_multiplier * (6 / epsilon) * sqrt(n ln(4T / beta)) are flagged.
  double reliability_multiplier = 1.0;
  uint64_t oracle_seed = 0;
  uint32_t max_bins = kDefaultMaxBins;
};

struct RegionAverage {
  std::vector<double> mean;
  double count_estimate = 0.0;
  bool reliable = false;
  double sigma = 0.0;
};

// Minimum sigma multiplier for which the centered reports are
// (epsilon / 2, delta)-private.
inline constexpr double kMinSigmaMultiplier = 2.8284271247461903;

double LdpAvgSigma(double diameter, double epsilon, double delta,
                   double multiplier);
// (12 / epsilon) * sqrt(n ln(4T / beta)).
double LdpAvgMinCount(double epsilon, uint64_t n, size_t regions, double beta);
// 36 sqrt(d n) ln(8 d T / (beta delta)) diam / (epsilon r).
double LdpAvgErrorBound(double epsilon, double delta, double beta, uint64_t n,
                        size_t d, size_t regions, double diameter,
                        double count);

// Counts at epsilon / 2 through the frequency oracle, vectors at epsilon / 2.
// Uses two channels: channel + ".count" and channel + ".vec".
absl::StatusOr<std::vector<RegionAverage>> LdpAvg(
    ProtocolSession& session, uint32_t round, const std::string& channel,
    const PointSet& points, std::span<const uint32_t> user_ids,
    std::span<const int64_t> region_of_user, const RegionPartition& partition,
    const LdpAvgParams& params, Rng& rng);
absl::StatusOr<std::vector<RegionAverage>> LdpAvg(
    ProtocolSession& session, uint32_t round, const std::string& channel,
    const PointSet& points, std::span<const uint32_t> user_ids,
    const RegionPartition& partition, const LdpAvgParams& params, Rng& rng);

}  // namespace ldpkm

#endif  // LDPKM_GAUSSIAN_MECHANISM_H_
