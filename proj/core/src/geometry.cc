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

#include "ldpkm/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "Eigen/Dense"
#include "absl/strings/str_cat.h"

namespace ldpkm {
namespace {

constexpr size_t kPairwiseCutoff = 10000;
constexpr double kOracleBudget = 1e6;

double SumTerms(std::vector<double>& terms) {
  if (terms.size() > kPairwiseCutoff) return PairwiseSum(terms);
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

absl::Status CheckCenters(size_t dim, const CenterSet& centers) {
  if (centers.k() == 0) {
    return absl::InvalidArgumentError("empty center set");
  }
  if (centers.dim() != dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: points ", dim, ", centers ",
                     centers.dim()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Objective> ObjectiveFromExponent(int p) {
  if (p == 1) return Objective::kMedian;
  if (p == 2) return Objective::kMeans;
  return absl::InvalidArgumentError(absl::StrCat("p must be 1 or 2, got ", p));
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double Distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(SquaredDistance(a, b));
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

double DistancePow(std::span<const double> a, std::span<const double> b,
                   Objective p) {
  const double sq = SquaredDistance(a, b);
  return p == Objective::kMeans ? sq : std::sqrt(sq);
}

double PairwiseSum(std::span<const double> values) {
  if (values.size() <= 128) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const size_t half = values.size() / 2;
  return PairwiseSum(values.subspan(0, half)) +
         PairwiseSum(values.subspan(half));
}

VectorList::VectorList(size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {}

void VectorList::Append(std::span<const double> v) {
  coords_.insert(coords_.end(), v.begin(), v.end());
}

absl::StatusOr<PointSet> PointSet::Create(size_t dim, double radius_bound,
                                          std::vector<double> coords) {
  if (dim == 0) return absl::InvalidArgumentError("dim must be positive");
  if (!(radius_bound > 0.0) || !std::isfinite(radius_bound)) {
    return absl::InvalidArgumentError("radius bound must be positive");
  }
  if (coords.size() % dim != 0) {
    return absl::InvalidArgumentError(
        "coordinate count is not a multiple of dim");
  }
  VectorList points(dim, std::move(coords));
  const double limit = radius_bound * (1.0 + 1e-9);
  for (size_t i = 0; i < points.size(); ++i) {
    const double norm = Norm(points[i]);
    if (!std::isfinite(norm) || norm > limit) {
      return absl::InvalidArgumentError(absl::StrCat(
          "point ", i, " has norm ", norm, " outside B(0, ", radius_bound,
          ")"));
    }
  }
  return PointSet(std::move(points), radius_bound);
}

PointSet PointSet::Subset(std::span<const size_t> indices) const {
  VectorList sub(dim());
  for (size_t i : indices) sub.Append(points_[i]);
  return PointSet(std::move(sub), radius_bound_);
}

absl::StatusOr<WeightedPointSet> WeightedPointSet::Create(
    size_t dim, std::vector<double> coords, std::vector<double> weights) {
  if (dim == 0) return absl::InvalidArgumentError("dim must be positive");
  if (coords.size() != dim * weights.size()) {
    return absl::InvalidArgumentError("coordinate and weight counts differ");
  }
  for (double& w : weights) {
    if (!std::isfinite(w)) {
      return absl::InvalidArgumentError("non-finite weight");
    }
    w = std::max(w, 0.0);
  }
  for (double c : coords) {
    if (!std::isfinite(c)) {
      return absl::InvalidArgumentError("non-finite coordinate");
    }
  }
  WeightedPointSet out;
  out.points_ = VectorList(dim, std::move(coords));
  out.weights_ = std::move(weights);
  return out;
}

WeightedPointSet WeightedPointSet::Unit(const PointSet& points) {
  WeightedPointSet out;
  out.points_ = points.points();
  out.weights_.assign(points.size(), 1.0);
  return out;
}

double WeightedPointSet::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

size_t WeightedPointSet::support_size() const {
  return std::count_if(weights_.begin(), weights_.end(),
                       [](double w) { return w > 0.0; });
}

absl::StatusOr<CenterSet> CenterSet::Create(size_t dim,
                                            std::vector<double> coords) {
  if (dim == 0) return absl::InvalidArgumentError("dim must be positive");
  if (coords.empty() || coords.size() % dim != 0) {
    return absl::InvalidArgumentError("center set must hold k >= 1 vectors");
  }
  return CenterSet(VectorList(dim, std::move(coords)));
}

absl::StatusOr<CenterSet> CenterSet::FromList(const VectorList& list) {
  return Create(list.dim(), list.coords());
}

size_t NearestCenter(std::span<const double> x, const VectorList& centers,
                     double* squared_distance) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < centers.size(); ++j) {
    const double d = SquaredDistance(x, centers[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (squared_distance != nullptr) *squared_distance = best_d;
  return best;
}

absl::StatusOr<double> Cost(const PointSet& points, const CenterSet& centers,
                            Objective p) {
  if (auto s = CheckCenters(points.dim(), centers); !s.ok()) return s;
  std::vector<double> terms(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    double sq;
    NearestCenter(points[i], centers.centers(), &sq);
    terms[i] = p == Objective::kMeans ? sq : std::sqrt(sq);
  }
  return SumTerms(terms);
}

absl::StatusOr<double> Cost(const WeightedPointSet& points,
                            const CenterSet& centers, Objective p) {
  if (auto s = CheckCenters(points.dim(), centers); !s.ok()) return s;
  std::vector<double> terms(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    double sq;
    NearestCenter(points.point(i), centers.centers(), &sq);
    terms[i] = points.weight(i) * (p == Objective::kMeans ? sq : std::sqrt(sq));
  }
  return SumTerms(terms);
}

absl::StatusOr<OptResult> OptOracle(const WeightedPointSet& points, size_t k,
                                    Objective p, const VectorList& pool) {
  if (k == 0) return absl::InvalidArgumentError("k must be positive");
  if (pool.dim() != points.dim()) {
    return absl::InvalidArgumentError("pool dimension mismatch");
  }
  const size_t m = pool.size();
  if (k > m) return absl::InvalidArgumentError("k exceeds pool size");
  double combos = 1.0;
  for (size_t i = 0; i < k; ++i) {
    combos = combos * static_cast<double>(m - i) / static_cast<double>(i + 1);
  }
  if (combos > kOracleBudget) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "opt oracle needs ", combos, " subsets; budget is ", kOracleBudget));
  }
  // Weighted distance table; the subset cost is a row-wise min over it.
  const size_t n = points.size();
  std::vector<double> table(n * m);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      table[i * m + j] = points.weight(i) * DistancePow(points.point(i),
                                                        pool[j], p);
    }
  }
  std::vector<size_t> idx(k);
  for (size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<size_t> best_idx;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> terms(n);
  while (true) {
    for (size_t i = 0; i < n; ++i) {
      double v = std::numeric_limits<double>::infinity();
      for (size_t j : idx) v = std::min(v, table[i * m + j]);
      terms[i] = v;
    }
    const double c = SumTerms(terms);
    if (c < best) {
      best = c;
      best_idx = idx;
    }
    // Next combination in lexicographic order.
    size_t pos = k;
    while (pos > 0 && idx[pos - 1] == m - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  VectorList chosen(pool.dim());
  for (size_t j : best_idx) chosen.Append(pool[j]);
  auto centers = CenterSet::FromList(chosen);
  if (!centers.ok()) return centers.status();
  return OptResult{*std::move(centers), best_idx, best};
}

absl::StatusOr<OptResult> OptOracle(const PointSet& points, size_t k,
                                    Objective p, const VectorList& pool) {
  return OptOracle(WeightedPointSet::Unit(points), k, p, pool);
}

OrthonormalBasis OrthonormalBasis::Identity(size_t d) {
  std::vector<double> c(d * d, 0.0);
  for (size_t i = 0; i < d; ++i) c[i * d + i] = 1.0;
  return OrthonormalBasis(VectorList(d, std::move(c)));
}

std::vector<double> OrthonormalBasis::Project(std::span<const double> x) const {
  std::vector<double> out(vectors_.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = Dot(x, vectors_[i]);
  return out;
}

std::vector<double> OrthonormalBasis::Unproject(
    std::span<const double> coords) const {
  std::vector<double> out(dim(), 0.0);
  for (size_t i = 0; i < vectors_.size(); ++i) {
    const auto z = vectors_[i];
    for (size_t j = 0; j < out.size(); ++j) out[j] += coords[i] * z[j];
  }
  return out;
}

double OrthonormalBasis::MaxGramDeviation() const {
  double worst = 0.0;
  for (size_t i = 0; i < vectors_.size(); ++i) {
    for (size_t j = 0; j < vectors_.size(); ++j) {
      const double g = Dot(vectors_[i], vectors_[j]) - (i == j ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

OrthonormalBasis RandomBasis(size_t d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (size_t col = 0; col < d; ++col) {
    for (size_t row = 0; row < d; ++row) g(row, col) = rng.Normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd& r = qr.matrixQR();
  std::vector<double> coords(d * d);
  for (size_t i = 0; i < d; ++i) {
    const double sign = r(i, i) < 0.0 ? -1.0 : 1.0;
    for (size_t j = 0; j < d; ++j) coords[i * d + j] = sign * q(j, i);
  }
  return OrthonormalBasis(VectorList(d, std::move(coords)));
}

size_t EnclosingCount(const PointSet& points, std::span<const double> center,
                      double radius) {
  const double r2 = radius * radius;
  size_t count = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (SquaredDistance(points[i], center) <= r2) ++count;
  }
  return count;
}

}  // namespace ldpkm
