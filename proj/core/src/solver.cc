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

#include "ldpkm/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "absl/strings/str_cat.h"

namespace ldpkm {
namespace {

// Indices of the first occurrence of each distinct positive-weight point.
std::vector<size_t> DistinctSupport(const WeightedPointSet& points) {
  std::set<std::vector<double>> seen;
  std::vector<size_t> out;
  for (size_t i = 0; i < points.size(); ++i) {
    if (points.weight(i) <= 0.0) continue;
    auto x = points.point(i);
    if (seen.insert(std::vector<double>(x.begin(), x.end())).second) {
      out.push_back(i);
    }
  }
  return out;
}

double WeightedCost(const WeightedPointSet& points, const VectorList& centers,
                    Objective p, std::vector<size_t>* assignment) {
  std::vector<double> terms(points.size());
  if (assignment != nullptr) assignment->resize(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    double sq;
    const size_t j = NearestCenter(points.point(i), centers, &sq);
    if (assignment != nullptr) (*assignment)[i] = j;
    terms[i] = points.weight(i) * (p == Objective::kMeans ? sq : std::sqrt(sq));
  }
  return PairwiseSum(terms);
}

double MedianObjective(const WeightedPointSet& points,
                       std::span<const size_t> members,
                       std::span<const double> y) {
  double s = 0.0;
  for (size_t i : members) s += points.weight(i) * Distance(points.point(i), y);
  return s;
}

}  // namespace

absl::Status ValidateSolverConfig(const SolverConfig& config) {
  if (config.restarts < 1) return absl::InvalidArgumentError("restarts >= 1");
  if (!(config.tol > 0.0)) return absl::InvalidArgumentError("tol must be > 0");
  return absl::OkStatus();
}

std::vector<size_t> KMeansPlusPlusSeed(const WeightedPointSet& points, size_t k,
                                       Objective p, Rng& rng) {
  const size_t n = points.size();
  std::vector<size_t> chosen;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  auto pick = [&](const std::vector<double>& mass) -> int64_t {
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) return -1;
    const double target = rng.Uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      acc += mass[i];
      if (target < acc && mass[i] > 0.0) return static_cast<int64_t>(i);
    }
    for (size_t i = n; i > 0; --i) {
      if (mass[i - 1] > 0.0) return static_cast<int64_t>(i - 1);
    }
    return -1;
  };
  std::vector<double> mass(points.weights());
  int64_t first = pick(mass);
  if (first < 0) return chosen;
  chosen.push_back(first);
  while (chosen.size() < k) {
    const auto c = points.point(chosen.back());
    for (size_t i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], DistancePow(points.point(i), c, p));
      mass[i] = points.weight(i) * dist[i];
    }
    int64_t next = pick(mass);
    if (next < 0) break;  // every remaining point sits on a center
    chosen.push_back(next);
  }
  return chosen;
}

std::vector<double> WeightedGeometricMedian(const WeightedPointSet& points,
                                            std::span<const size_t> members,
                                            std::span<const double> start,
                                            uint32_t iters, double tol) {
  const size_t d = points.dim();
  std::vector<double> y(start.begin(), start.end());
  std::vector<double> next(d);
  for (uint32_t it = 0; it < iters; ++it) {
    double denom = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    bool coincident = false;
    for (size_t i : members) {
      const double w = points.weight(i);
      if (w <= 0.0) continue;
      const double dist = Distance(points.point(i), y);
      if (dist < 1e-12) {
        coincident = true;
        break;
      }
      const auto x = points.point(i);
      for (size_t j = 0; j < d; ++j) next[j] += w * x[j] / dist;
      denom += w / dist;
    }
    if (coincident) {
      for (double& v : y) v += 1e-12;
      continue;
    }
    if (!(denom > 0.0)) break;
    double step2 = 0.0;
    for (size_t j = 0; j < d; ++j) {
      next[j] /= denom;
      step2 += (next[j] - y[j]) * (next[j] - y[j]);
    }
    y.swap(next);
    if (std::sqrt(step2) <= tol) break;
  }
  return y;
}

double Lloyd(const WeightedPointSet& points, VectorList centers,
                          Objective p, const SolverConfig& config,
                          VectorList* out, std::vector<double>* trace) {
  const size_t k = centers.size();
  const size_t d = points.dim();
  std::vector<size_t> assign;
  double cost = WeightedCost(points, centers, p, &assign);
  if (trace != nullptr) trace->push_back(cost);
  for (uint32_t it = 0; it < config.max_iters; ++it) {
    VectorList next = centers;
    std::vector<std::vector<size_t>> members(k);
    for (size_t i = 0; i < points.size(); ++i) {
      if (points.weight(i) > 0.0) members[assign[i]].push_back(i);
    }
    for (size_t j = 0; j < k; ++j) {
      if (members[j].empty()) continue;
      auto row = next.mutable_row(j);
      if (p == Objective::kMeans) {
        double wsum = 0.0;
        std::vector<double> acc(d, 0.0);
        for (size_t i : members[j]) {
          const double w = points.weight(i);
          const auto x = points.point(i);
          for (size_t t = 0; t < d; ++t) acc[t] += w * x[t];
          wsum += w;
        }
        for (size_t t = 0; t < d; ++t) row[t] = acc[t] / wsum;
      } else {
        auto y = WeightedGeometricMedian(points, members[j], centers[j],
                                         config.weiszfeld_iters,
                                         config.weiszfeld_tol);
        // Keep the old center unless the median step helps.
        if (MedianObjective(points, members[j], y) <
            MedianObjective(points, members[j], centers[j])) {
          std::copy(y.begin(), y.end(), row.begin());
        }
      }
    }
    std::vector<size_t> next_assign;
    const double next_cost = WeightedCost(points, next, p, &next_assign);
    if (next_cost > cost) break;  // guards rounding; cost never goes up
    const bool small = cost - next_cost <= config.tol * std::max(cost, 1e-300);
    centers = std::move(next);
    assign = std::move(next_assign);
    cost = next_cost;
    if (trace != nullptr) trace->push_back(cost);
    if (small) break;
  }
  if (out != nullptr) *out = std::move(centers);
  return cost;
}

absl::StatusOr<SolveResult> LocalSearch(const WeightedPointSet& points,
                                        size_t k, Objective p, Rng& rng) {
  const std::vector<size_t> support = DistinctSupport(points);
  const size_t m = support.size();
  // Weighted distance table over the support.
  std::vector<double> table(points.size() * m);
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = 0; j < m; ++j) {
      table[i * m + j] =
          points.weight(i) * DistancePow(points.point(i), points.point(support[j]), p);
    }
  }
  auto eval = [&](const std::vector<size_t>& slots) {
    double s = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      double v = std::numeric_limits<double>::infinity();
      for (size_t j : slots) v = std::min(v, table[i * m + j]);
      s += v;
    }
    return s;
  };
  // Start from k-means++ over the support.
  std::vector<size_t> slots;
  {
    const auto seed = KMeansPlusPlusSeed(points, k, p, rng);
    std::set<size_t> used;
    for (size_t idx : seed) {
      auto it = std::find_if(support.begin(), support.end(), [&](size_t s) {
        return SquaredDistance(points.point(s), points.point(idx)) == 0.0;
      });
      const size_t pos = it - support.begin();
      if (used.insert(pos).second) slots.push_back(pos);
    }
    for (size_t j = 0; j < m && slots.size() < k; ++j) {
      if (used.insert(j).second) slots.push_back(j);
    }
  }
  double cost = eval(slots);
  bool improved = true;
  while (improved) {
    improved = false;
    for (size_t s = 0; s < slots.size() && !improved; ++s) {
      for (size_t j = 0; j < m && !improved; ++j) {
        if (std::find(slots.begin(), slots.end(), j) != slots.end()) continue;
        std::vector<size_t> trial = slots;
        trial[s] = j;
        const double c = eval(trial);
        if (c < cost * (1.0 - 1e-12)) {
          slots = std::move(trial);
          cost = c;
          improved = true;
        }
      }
    }
  }
  VectorList centers(points.dim());
  for (size_t j : slots) centers.Append(points.point(support[j]));
  auto cs = CenterSet::FromList(centers);
  if (!cs.ok()) return cs.status();
  SolveResult r{*std::move(cs), cost, false, {cost}};
  return r;
}

absl::StatusOr<SolveResult> Solve(const WeightedPointSet& points, size_t k,
                                  Objective p, const SolverConfig& config,
                                  Rng& rng) {
  if (auto s = ValidateSolverConfig(config); !s.ok()) return s;
  if (k == 0) return absl::InvalidArgumentError("k must be positive");
  const std::vector<size_t> support = DistinctSupport(points);
  if (support.empty()) {
    return absl::FailedPreconditionError("no positive-weight point to cluster");
  }
  if (support.size() <= k) {
    VectorList centers(points.dim());
    for (size_t i : support) centers.Append(points.point(i));
    for (size_t j = 0; centers.size() < k; ++j) {
      centers.Append(points.point(support[j % support.size()]));
    }
    auto cs = CenterSet::FromList(centers);
    if (!cs.ok()) return cs.status();
    const double cost = WeightedCost(points, centers, p, nullptr);
    return SolveResult{*std::move(cs), cost, support.size() < k, {cost}};
  }
  if (config.method == SolverMethod::kLocalSearch) {
    Rng ls = rng.Fork("local_search");
    return LocalSearch(points, k, p, ls);
  }
  std::optional<SolveResult> best;
  for (uint32_t r = 0; r < config.restarts; ++r) {
    Rng restart = rng.Fork(r);
    const auto seed = KMeansPlusPlusSeed(points, k, p, restart);
    VectorList start(points.dim());
    for (size_t i : seed) start.Append(points.point(i));
    // Seeding can stop early only if every point sits on a chosen center.
    for (size_t j = 0; start.size() < k; ++j) {
      start.Append(points.point(support[j % support.size()]));
    }
    VectorList centers;
    std::vector<double> trace;
    Lloyd(points, std::move(start), p, config, &centers, &trace);
    const double cost = trace.back();
    if (!best.has_value() || cost < best->cost) {
      auto cs = CenterSet::FromList(centers);
      if (!cs.ok()) return cs.status();
      best = SolveResult{*std::move(cs), cost, false, std::move(trace)};
    }
  }
  return *std::move(best);
}

}  // namespace ldpkm
