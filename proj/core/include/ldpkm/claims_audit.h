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

// Instrumented checks of the pipeline's intermediate guarantees, computed
// from the ground truth a simulation retains.

#ifndef LDPKM_CLAIMS_AUDIT_H_
#define LDPKM_CLAIMS_AUDIT_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "ldpkm/weighted_centers.h"

namespace ldpkm {

struct ClaimsReport {
  // Every candidate was created by at least t n^-b / (16 M) users.
  double min_creator_ratio = 0.0;
  bool creators_ok = false;
  // max over y in Y of min_{w in W} ||y - w|| / r(y).
  double max_distance_ratio = 0.0;
  // Cost on S of the best k-subset of W the solver finds, and the
  // non-private baseline.
  double subset_cost = 0.0;
  double baseline_cost = 0.0;
  // sum_i ||b(i) - x_i||^p.
  double assignment_cost = 0.0;
  // Fitted constants over random center sets D:
  //   cost_S(D) <= s_over_b * (cost_B(D) + assignment_cost)
  //   cost_B(D) <= b_over_s * (cost_S(D) + assignment_cost)
  // with B = (W, true b weights).
  double s_over_b = 0.0;
  double b_over_s = 0.0;
  // Largest relative gap between two independent computations of cost_B(D).
  double cost_path_gap = 0.0;
  // Every w in W has b^(w) / b(w) in [1/2, 2].
  bool weights_ok = false;
  size_t weight_violations = 0;
  double min_weight_ratio = 0.0;
  double max_weight_ratio = 0.0;

  // "claim,quantity,value".
  std::string ToCsv() const;
};

// Requires a run made with instrumentation. baseline_cost is computed with
// the configured solver on the raw points when not given.
absl::StatusOr<ClaimsReport> AuditClaims(const PointSet& points,
                                         const PipelineConfig& config,
                                         const PipelineResult& result, Rng& rng,
                                         std::optional<double> baseline_cost = {},
                                         size_t center_sets = 20);

}  // namespace ldpkm

#endif  // LDPKM_CLAIMS_AUDIT_H_
