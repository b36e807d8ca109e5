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

#include "ldpkm/gaussian_mechanism.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace ldpkm {

double GaussianSumSigma(double lambda, double epsilon, double delta) {
  return 2.0 * lambda * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

double GaussianSumBound(double lambda, uint64_t n, size_t d, double epsilon,
                        double delta, double beta) {
  return 2.0 * lambda * std::sqrt(static_cast<double>(n) * d) *
         std::log(2.0 / (beta * delta)) / epsilon;
}

absl::StatusOr<std::vector<double>> GaussianSum(
    ProtocolSession& session, uint32_t round, const std::string& channel,
    const PointSet& points, std::span<const uint32_t> user_ids, double epsilon,
    double delta, Rng& rng) {
  if (!(epsilon > 0.0)) return absl::InvalidArgumentError("epsilon must be > 0");
  if (!(delta > 0.0) || delta >= 1.0) {
    return absl::InvalidArgumentError(
        "the Gaussian mechanism needs 0 < delta < 1");
  }
  VectorList values(points.dim());
  for (uint32_t u : user_ids) values.Append(points[u]);
  std::vector<int64_t> slots(user_ids.size(), 0);
  const double sigma[1] = {
      GaussianSumSigma(points.radius_bound(), epsilon, delta)};
  VectorList sums = session.SlottedGaussianSum(round, channel, user_ids, values,
                                               slots, sigma, rng);
  return sums.coords();
}

absl::StatusOr<RegionPartition> RegionPartition::Create(
    std::vector<Region> regions, OrthonormalBasis frame, KeyFn key) {
  if (regions.empty()) return absl::InvalidArgumentError("empty partition");
  for (size_t t = 0; t < regions.size(); ++t) {
    if (!(regions[t].radius > 0.0) || regions[t].reference.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("region ", t, " needs a reference and positive radius"));
    }
    if (regions[t].lo.size() != regions[t].hi.size()) {
      return absl::InvalidArgumentError(absl::StrCat("region ", t, " box"));
    }
  }
  RegionPartition p;
  p.regions_ = std::move(regions);
  p.frame_ = std::move(frame);
  p.key_ = std::move(key);
  return p;
}

bool RegionPartition::Contains(size_t t, std::span<const double> x) const {
  const Region& r = regions_[t];
  if (key_ && key_(x) != r.key) return false;
  if (!r.lo.empty()) {
    std::vector<double> z =
        frame_.dim() > 0 ? frame_.Project(x) : std::vector<double>(x.begin(), x.end());
    for (size_t i = 0; i < r.lo.size(); ++i) {
      if (z[i] < r.lo[i] || z[i] > r.hi[i]) return false;
    }
  }
  return SquaredDistance(x, r.reference) <= r.radius * r.radius;
}

int64_t RegionPartition::Locate(std::span<const double> x) const {
  for (size_t t = 0; t < regions_.size(); ++t) {
    if (Contains(t, x)) return static_cast<int64_t>(t);
  }
  return -1;
}

double LdpAvgSigma(double diameter, double epsilon, double delta,
                   double multiplier) {
  return multiplier * diameter / epsilon * std::sqrt(std::log(1.25 / delta));
}

double LdpAvgMinCount(double epsilon, uint64_t n, size_t regions,
                      double beta) {
  return 12.0 / epsilon *
         std::sqrt(static_cast<double>(n) * std::log(4.0 * regions / beta));
}

double LdpAvgErrorBound(double epsilon, double delta, double beta, uint64_t n,
                        size_t d, size_t regions, double diameter,
                        double count) {
  return 36.0 * std::sqrt(static_cast<double>(d) * n) *
         std::log(8.0 * d * regions / (beta * delta)) * diameter /
         (epsilon * count);
}

absl::StatusOr<std::vector<RegionAverage>> LdpAvg(
    ProtocolSession& session, uint32_t round, const std::string& channel,
    const PointSet& points, std::span<const uint32_t> user_ids,
    std::span<const int64_t> region_of_user, const RegionPartition& partition,
    const LdpAvgParams& params, Rng& rng) {
  if (partition.size() == 0) return absl::InvalidArgumentError("empty partition");
  if (!(params.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be > 0");
  }
  if (!(params.delta > 0.0) || params.delta >= 1.0) {
    return absl::InvalidArgumentError("LDP-AVG needs 0 < delta < 1");
  }
  if (region_of_user.size() != user_ids.size()) {
    return absl::InvalidArgumentError("one region index per user required");
  }
  const size_t T = partition.size();
  const size_t d = points.dim();
  const uint64_t n = user_ids.size();

  // Counts.
  FrequencyOracleConfig fo;
  fo.domain_size = T;
  fo.epsilon = params.epsilon / 2.0;
  fo.hash_seed = params.oracle_seed;
  fo.max_bins = params.max_bins;
  fo.noise_off = session.options().noise_off;
  auto oracle = UnaryFrequencyOracle::Create(fo);
  if (!oracle.ok()) return oracle.status();
  std::vector<uint64_t> items(n);
  for (size_t i = 0; i < n; ++i) {
    items[i] = region_of_user[i] < 0 ? kNullItem
                                     : static_cast<uint64_t>(region_of_user[i]);
  }
  Rng count_rng = rng.Fork("count");
  FrequencyEstimate counts =
      session.Histogram(round, channel + ".count", *oracle, user_ids, items,
                        params.beta / 2.0, count_rng);

  // Vectors, centered and clipped to the region's ball.
  VectorList values(d);
  std::vector<double> v(d);
  for (size_t i = 0; i < n; ++i) {
    const auto x = points[user_ids[i]];
    if (region_of_user[i] < 0) {
      std::fill(v.begin(), v.end(), 0.0);
    } else {
      const Region& r = partition.region(region_of_user[i]);
      double norm2 = 0.0;
      for (size_t j = 0; j < d; ++j) {
        v[j] = x[j] - r.reference[j];
        norm2 += v[j] * v[j];
      }
      const double norm = std::sqrt(norm2);
      if (norm > r.radius) {
        for (double& c : v) c *= r.radius / norm;
      }
    }
    values.Append(v);
  }
  std::vector<double> sigma(T);
  for (size_t t = 0; t < T; ++t) {
    sigma[t] = LdpAvgSigma(partition.region(t).diameter(), params.epsilon,
                           params.delta, params.sigma_multiplier);
  }
  Rng vec_rng = rng.Fork("vec");
  VectorList sums = session.SlottedGaussianSum(
      round, channel + ".vec", user_ids, values, region_of_user, sigma, vec_rng);

  const double floor =
      session.options().noise_off
          ? 0.0
          : params.reliability_multiplier * 6.0 / params.epsilon *
                std::sqrt(static_cast<double>(n) *
                          std::log(4.0 * T / params.beta));
  std::vector<RegionAverage> out(T);
  for (size_t t = 0; t < T; ++t) {
    RegionAverage& a = out[t];
    a.count_estimate = counts(t);
    a.sigma = sigma[t];
    a.reliable = a.count_estimate > 0.0 && a.count_estimate >= floor;
    a.mean = partition.region(t).reference;
    if (a.reliable) {
      const auto s = sums[t];
      for (size_t j = 0; j < d; ++j) a.mean[j] += s[j] / a.count_estimate;
    }
  }
  return out;
}

absl::StatusOr<std::vector<RegionAverage>> LdpAvg(
    ProtocolSession& session, uint32_t round, const std::string& channel,
    const PointSet& points, std::span<const uint32_t> user_ids,
    const RegionPartition& partition, const LdpAvgParams& params, Rng& rng) {
  std::vector<int64_t> region(user_ids.size());
  for (size_t i = 0; i < user_ids.size(); ++i) {
    region[i] = partition.Locate(points[user_ids[i]]);
  }
  return LdpAvg(session, round, channel, points, user_ids, region, partition,
                params, rng);
}

}  // namespace ldpkm
