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

#include "ldpkm/claims_audit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "ldpkm/point_io.h"

namespace ldpkm {

std::string ClaimsReport::ToCsv() const {
  std::string out = "claim,quantity,value\n";
  auto row = [&](int claim, const char* q, double v) {
    absl::StrAppend(&out, claim, ",", q, ",", FormatDouble(v), "\n");
  };
  row(10, "min_creator_ratio", min_creator_ratio);
  row(10, "creators_ok", creators_ok ? 1 : 0);
  row(11, "max_distance_ratio", max_distance_ratio);
  row(12, "subset_cost", subset_cost);
  row(12, "baseline_cost", baseline_cost);
  row(13, "assignment_cost", assignment_cost);
  row(14, "s_over_b", s_over_b);
  row(14, "b_over_s", b_over_s);
  row(14, "cost_path_gap", cost_path_gap);
  row(15, "weights_ok", weights_ok ? 1 : 0);
  row(15, "weight_violations", static_cast<double>(weight_violations));
  row(15, "min_weight_ratio", min_weight_ratio);
  row(15, "max_weight_ratio", max_weight_ratio);
  return out;
}

absl::StatusOr<ClaimsReport> AuditClaims(const PointSet& points,
                                         const PipelineConfig& config,
                                         const PipelineResult& result, Rng& rng,
                                         std::optional<double> baseline_cost,
                                         size_t center_sets) {
  if (!result.truth.has_value()) {
    return absl::FailedPreconditionError("run was not instrumented");
  }
  const PipelineTruth& truth = *result.truth;
  const Objective p = config.objective;
  const size_t n = points.size();
  const size_t d = points.dim();
  const size_t Y = result.candidates.size();
  ClaimsReport rep;

  rep.min_creator_ratio = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < Y; ++j) {
    const Candidate& c = result.candidates[j];
    const auto& gc = result.sweep[c.id.radius];
    const double floor =
        result.t * result.specs[c.id.radius].p_target / (16.0 * gc.M);
    rep.min_creator_ratio =
        std::min(rep.min_creator_ratio, truth.creators[j] / floor);
  }
  rep.creators_ok = rep.min_creator_ratio >= 1.0;

  VectorList w_centers(d);
  std::vector<double> w_true;
  for (size_t j : result.w) {
    w_centers.Append(result.candidates[j].center);
    w_true.push_back(truth.b_count[j]);
  }
  for (const Candidate& c : result.candidates) {
    double sq = 0.0;
    NearestCenter(c.center, w_centers, &sq);
    rep.max_distance_ratio =
        std::max(rep.max_distance_ratio, std::sqrt(sq) / c.radius);
  }

  if (baseline_cost.has_value()) {
    rep.baseline_cost = *baseline_cost;
  } else {
    Rng base_rng = rng.Fork("baseline");
    auto base = Solve(WeightedPointSet::Unit(points), config.k, p,
                      config.solver, base_rng);
    if (!base.ok()) return base.status();
    rep.baseline_cost = base->cost;
  }

  auto b_set = WeightedPointSet::Create(d, w_centers.coords(), w_true);
  if (!b_set.ok()) return b_set.status();
  if (b_set->total_weight() > 0.0) {
    Rng ls_rng = rng.Fork("subset");
    auto subset = LocalSearch(*b_set, config.k, p, ls_rng);
    if (!subset.ok()) return subset.status();
    auto cost = Cost(points, subset->centers, p);
    if (!cost.ok()) return cost.status();
    rep.subset_cost = *cost;
  } else {
    rep.subset_cost = std::numeric_limits<double>::infinity();
  }

  std::vector<double> terms(n);
  for (size_t i = 0; i < n; ++i) {
    terms[i] = DistancePow(points[i], result.candidates[truth.b[i]].center, p);
  }
  rep.assignment_cost = PairwiseSum(terms);

  Rng d_rng = rng.Fork("center_sets");
  for (size_t s = 0; s < center_sets; ++s) {
    std::vector<double> coords;
    for (size_t j = 0; j < config.k; ++j) {
      auto x = points[d_rng.UniformInt(n)];
      coords.insert(coords.end(), x.begin(), x.end());
    }
    auto D = CenterSet::Create(d, coords);
    if (!D.ok()) return D.status();
    auto cost_s = Cost(points, *D, p);
    auto cost_b = Cost(*b_set, *D, p);
    if (!cost_s.ok()) return cost_s.status();
    if (!cost_b.ok()) return cost_b.status();
    // Second path: per-point assignment of b(i) weights, summed directly.
    double direct = 0.0;
    for (size_t k = 0; k < w_centers.size(); ++k) {
      double sq = 0.0;
      NearestCenter(w_centers[k], D->centers(), &sq);
      const double dist = p == Objective::kMeans ? sq : std::sqrt(sq);
      direct += w_true[k] * dist;
    }
    const double scale = std::max({std::abs(direct), std::abs(*cost_b), 1e-300});
    rep.cost_path_gap =
        std::max(rep.cost_path_gap, std::abs(direct - *cost_b) / scale);
    const double denom_b = *cost_b + rep.assignment_cost;
    const double denom_s = *cost_s + rep.assignment_cost;
    if (denom_b > 0) rep.s_over_b = std::max(rep.s_over_b, *cost_s / denom_b);
    if (denom_s > 0) rep.b_over_s = std::max(rep.b_over_s, *cost_b / denom_s);
  }

  rep.min_weight_ratio = std::numeric_limits<double>::infinity();
  rep.max_weight_ratio = 0.0;
  for (size_t j : result.w) {
    const double b = truth.b_count[j];
    const double ratio = b > 0 ? result.candidates[j].b_hat / b
                               : std::numeric_limits<double>::infinity();
    rep.min_weight_ratio = std::min(rep.min_weight_ratio, ratio);
    rep.max_weight_ratio = std::max(rep.max_weight_ratio, ratio);
    if (!(ratio >= 0.5 && ratio <= 2.0)) ++rep.weight_violations;
  }
  rep.weights_ok = rep.weight_violations == 0;
  return rep;
}

}  // namespace ldpkm
