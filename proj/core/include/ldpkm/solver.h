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

// Non-private weighted k-means / k-median solvers.

#ifndef LDPKM_SOLVER_H_
#define LDPKM_SOLVER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/geometry.h"
#include "ldpkm/rng.h"

namespace ldpkm {

enum class SolverMethod { kKMeansPPLloyd, kLocalSearch };

struct SolverConfig {
  SolverMethod method = SolverMethod::kKMeansPPLloyd;
  uint32_t restarts = 8;
  uint32_t max_iters = 100;
  double tol = 1e-9;
  // Geometric-median steps for the k-median center update.
  uint32_t weiszfeld_iters = 50;
  double weiszfeld_tol = 1e-9;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

absl::Status ValidateSolverConfig(const SolverConfig& config);

struct SolveResult {
  CenterSet centers;
  double cost = 0.0;
  // k exceeded the number of distinct positive-weight points; the centers
  // are those points padded by repetition.
  bool degenerate = false;
  // Cost after seeding and after every Lloyd iteration of the kept restart.
  std::vector<double> trace;
};

// D^p sampling weighted by the point weights. Returns k entry indices.
std::vector<size_t> KMeansPlusPlusSeed(const WeightedPointSet& points, size_t k,
                                       Objective p, Rng& rng);

// Weiszfeld iteration for argmin_y sum_i w_i ||x_i - y|| over the given
// members, started at `start`.
std::vector<double> WeightedGeometricMedian(const WeightedPointSet& points,
                                            std::span<const size_t> members,
                                            std::span<const double> start,
                                            uint32_t iters, double tol);

// Alternating assignment / center update from the given start. Never
// increases the cost; appends the cost after each iteration to trace and
// returns the final cost.
double Lloyd(const WeightedPointSet& points, VectorList centers,
                          Objective p, const SolverConfig& config,
                          VectorList* out, std::vector<double>* trace);

// Single-swap local search with centers restricted to the positive-weight
// support, run to an exact local optimum.
absl::StatusOr<SolveResult> LocalSearch(const WeightedPointSet& points,
                                        size_t k, Objective p, Rng& rng);

// Dispatches on config.method. Restarts keep the cheapest result, ties to
// the earliest restart.
absl::StatusOr<SolveResult> Solve(const WeightedPointSet& points, size_t k,
                                  Objective p, const SolverConfig& config,
                                  Rng& rng);

}  // namespace ldpkm

#endif  // LDPKM_SOLVER_H_
