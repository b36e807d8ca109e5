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

// The full private clustering pipeline:
//   1. candidate centers from GoodCenters at a geometric grid of radii
//   2. every user picks a candidate a(i) from public outputs
//   3. histogram of a(i)                       -> weights a^(y)
//   4. keep W = {y : a^(y) >= theta_W}; b(i) = a(i) or the nearest w in W
//   5. histogram of b(i)                       -> weights b^(w)
//   6. non-private weighted clustering of (W, b^)

#ifndef LDPKM_WEIGHTED_CENTERS_H_
#define LDPKM_WEIGHTED_CENTERS_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/good_centers.h"
#include "ldpkm/lsh.h"
#include "ldpkm/privacy_budget.h"
#include "ldpkm/protocol.h"
#include "ldpkm/solver.h"

namespace ldpkm {

struct PipelineConfig {
  Mode mode = Mode::kDesk;
  size_t k = 1;
  Objective objective = Objective::kMeans;
  double epsilon = 1.0;
  double delta = 1e-6;
  double beta = 0.1;
  double a = 0.2;
  double b = 0.1;
  // Radii radius_top / 2^j, j < radius_levels. Zeros select Lambda and
  // ceil(log2 n) + 1 levels (the only choice in theory mode).
  double radius_top = 0.0;
  size_t radius_levels = 0;
  // Budget shares for the sweep and the two weight histograms (desk mode;
  // normalized when they sum above 1). Theory mode uses eps/(4 ceil(log2 n))
  // per radius and eps/4 per histogram.
  double share_sweep = 0.5;
  double share_weights_a = 0.25;
  double share_weights_b = 0.25;
  // Candidate threshold t: c_t times its formula unless t > 0.
  double c_t = 1.0;
  double t = 0.0;
  // theta_W = c_W (sqrt(d)/eps) n^{0.5+a} ln(1/beta) ln(dn/delta).
  double c_W = 1.0;
  size_t repetitions = 0;
  size_t max_list = 0;
  ProcedureThresholds thresholds;
  // Use the given collision targets instead of n^-b and n^-2-a.
  bool relaxed_lsh = false;
  double lsh_p = 0.5;
  double lsh_q = 1e-3;
  FamilyOptions lsh;
  SolverConfig solver;
  uint32_t max_bins = kDefaultMaxBins;
  SimulationOptions simulation;
  bool instrument = false;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Candidate ids order lexicographically: radius index, repetition, value.
struct CandidateId {
  uint32_t radius = 0;
  uint32_t m = 0;
  uint64_t u = 0;
  friend auto operator<=>(const CandidateId&, const CandidateId&) = default;
};

struct Candidate {
  CandidateId id;
  std::vector<double> center;
  double radius = 0.0;
  double a_hat = 0.0;
  bool in_w = false;
  double b_hat = 0.0;
};

// r_top / 2^j for j = 0..levels-1.
std::vector<double> RadiusGrid(double top, size_t levels);
// ceil(log2 n), at least 1.
size_t LogRadiusCount(uint64_t n);

double CandidateThresholdW(double c_W, size_t d, uint64_t n, double a,
                           double epsilon, double beta, double delta);

// Recomputes a user's creation record and assignments from public round
// outputs and the user's own (i, x_i).
class Assigner {
 public:
  // capture: the creation ball radius in units of c r.
  Assigner(const std::vector<GoodCentersOutput>* sweep,
           std::vector<LshSpec> specs, std::vector<double> radii,
           double capture);

  const std::vector<CandidateId>& ids() const { return ids_; }
  const VectorList& centers() const { return centers_; }
  size_t size() const { return ids_.size(); }

  struct Creation {
    int64_t radius = -1;     // index of the smallest creating radius
    int64_t candidate = -1;  // the created candidate
  };
  // The smallest radius at which the user creates a center, if any.
  Creation Creates(std::span<const double> x, uint32_t user) const;
  // Step-2 rule. Users who create nothing take the nearest candidate.
  size_t AssignA(std::span<const double> x, uint32_t user,
                 Creation* creation = nullptr) const;

 private:
  const std::vector<GoodCentersOutput>* sweep_;
  std::vector<LshSpec> specs_;
  std::vector<double> radii_;
  double capture_;
  std::vector<CandidateId> ids_;
  VectorList centers_;
  std::vector<uint32_t> radius_of_;
};

// b = a when a is in W, else the nearest member of W (ties to lowest id).
// w_members must be ascending.
size_t AssignB(std::span<const double> x, size_t a,
               const std::vector<bool>& in_w,
               std::span<const size_t> w_members, const VectorList& w_centers);

// Ground truth retained by instrumented runs (simulation only).
struct PipelineTruth {
  std::vector<int64_t> creation_radius;  // per user, -1 when none
  std::vector<size_t> a;                 // per user
  std::vector<size_t> b;                 // per user
  std::vector<double> a_count;           // per candidate
  std::vector<double> b_count;           // per candidate
  std::vector<double> creators;          // per candidate
};

struct PipelineResult {
  std::vector<double> radii;
  double t = 0.0;
  double theta_w = 0.0;
  std::vector<LshSpec> specs;
  std::vector<GoodCentersOutput> sweep;
  std::vector<Candidate> candidates;  // ascending id
  std::vector<size_t> w;              // indices into candidates
  std::optional<SolveResult> solve;  // set on success
  // All b^ were non-positive and the solver fell back to equal weights.
  bool equal_weight_fallback = false;
  BudgetLedger ledger;
  std::optional<PipelineTruth> truth;

  // "radius_index,m,u,radius,x0..,a_hat,in_w,b_hat".
  std::string CandidatesCsv() const;
  // "x0..x{d-1}".
  std::string CentersCsv() const;
};

absl::Status ValidatePipelineConfig(const PipelineConfig& config);

absl::StatusOr<PipelineResult> WeightedCenters(
    const PointSet& points, const PipelineConfig& config, Rng& rng,
    ProtocolTranscript* transcript = nullptr);

}  // namespace ldpkm

#endif  // LDPKM_WEIGHTED_CENTERS_H_
