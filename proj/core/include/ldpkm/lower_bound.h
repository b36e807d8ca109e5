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

// The reduction from the gap-threshold promise problem to two-center
// clustering in one dimension, and the experiment that measures how our own
// private pipeline fares on its hard instances.

#ifndef LDPKM_LOWER_BOUND_H_
#define LDPKM_LOWER_BOUND_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/geometry.h"
#include "ldpkm/rng.h"
#include "ldpkm/weighted_centers.h"

namespace ldpkm {

enum class GapTrValue { kZero, kOne, kUndefined };

// 0 when no bit is set, 1 when at least tau are, undefined in between.
GapTrValue GapTr(std::span<const uint8_t> bits, double tau);

// Runs a clustering protocol on one-dimensional points in [0, 1] and returns
// two centers.
using ClusteringProtocol =
    std::function<absl::StatusOr<VectorList>(const PointSet&, Rng&)>;

inline constexpr double kLowerBoundBeta = 0.4;

struct ProtocolBResult {
  int output = 0;
  size_t interval = 0;
  double lo = 0.0;
  double hi = 0.0;
  double mu = 0.0;
  VectorList centers;
  // cost^p of the returned centers on the reduction's points.
  double cost = 0.0;
  // The inner protocol refused; the fixed public centers {0, 0} stand in.
  bool inner_refused = false;
};

// Intervals [j r, (j + 1) r] of width r = beta_const / 4 cover [0, 1]; one is
// drawn uniformly and its midpoint mu broadcast. Users with bit 1 hold mu,
// the rest hold 0. Returns 1 iff a center lies in the drawn interval.
absl::StatusOr<ProtocolBResult> ProtocolB(std::span<const uint8_t> bits,
                                          const ClusteringProtocol& protocol,
                                          double beta_const, Objective p,
                                          Rng& rng);

// Ignores its input: two centers uniform on [0, 1].
ClusteringProtocol ObliviousProtocol();
// The private pipeline with k = 2.
ClusteringProtocol PipelineProtocol(PipelineConfig config);

struct FloorOptions {
  std::vector<uint64_t> n_grid;
  std::vector<double> tau_multipliers = {0.25, 1.0, 4.0, 16.0};
  size_t trials = 100;
  double beta_const = kLowerBoundBeta;
  Objective p = Objective::kMeans;
};

struct FloorRow {
  uint64_t n = 0;
  double tau = 0.0;
  std::string instance;  // "zero" or "tau"
  double decision_error_rate = 0.0;
  double mean_cost = 0.0;
  double ci_low = 0.0;  // 95% normal interval on the mean cost
  double ci_high = 0.0;
  size_t trials = 0;
  size_t errors = 0;
  size_t refusals = 0;
  // Erring "tau" runs whose cost fell below (r/2)^p tau.
  size_t cost_bound_violations = 0;
};

// For each n and tau = ceil(multiplier * sqrt(n)): the all-zero instance and
// the instance with tau ones, `trials` runs each.
absl::StatusOr<std::vector<FloorRow>> FloorExperiment(
    const FloorOptions& options, const ClusteringProtocol& protocol, Rng& rng);

// "n,tau,instance,decision_error_rate,mean_cost,ci95_low,ci95_high".
std::string FloorCsv(std::span<const FloorRow> rows);

}  // namespace ldpkm

#endif  // LDPKM_LOWER_BOUND_H_
