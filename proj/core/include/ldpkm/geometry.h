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

// Points, weighted points, center sets and the clustering objectives.

#ifndef LDPKM_GEOMETRY_H_
#define LDPKM_GEOMETRY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpkm/rng.h"

namespace ldpkm {

// The clustering objective; the enum value is the exponent p.
enum class Objective : int { kMedian = 1, kMeans = 2 };

absl::StatusOr<Objective> ObjectiveFromExponent(int p);
inline int Exponent(Objective p) { return static_cast<int>(p); }

double Dot(std::span<const double> a, std::span<const double> b);
double SquaredDistance(std::span<const double> a, std::span<const double> b);
double Distance(std::span<const double> a, std::span<const double> b);
double Norm(std::span<const double> a);
// ||a - b||^p.
double DistancePow(std::span<const double> a, std::span<const double> b,
                   Objective p);

// Pairwise (tree) summation; exact to O(log n) ulps of the magnitudes.
double PairwiseSum(std::span<const double> values);

// Row-major block of equal-length vectors.
class VectorList {
 public:
  VectorList() = default;
  VectorList(size_t dim, std::vector<double> coords);
  explicit VectorList(size_t dim) : dim_(dim) {}

  size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  size_t dim() const { return dim_; }
  bool empty() const { return size() == 0; }
  std::span<const double> operator[](size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_row(size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }
  void Append(std::span<const double> v);
  const std::vector<double>& coords() const { return coords_; }

  friend bool operator==(const VectorList&, const VectorList&) = default;

 private:
  size_t dim_ = 0;
  std::vector<double> coords_;
};

// A database of n points in the ball B(0, radius_bound). Immutable.
class PointSet {
 public:
  // Empty set in dimension 0.
  PointSet() = default;
  // Fails if coords is not a multiple of dim or some point has norm above
  // radius_bound * (1 + 1e-9).
  static absl::StatusOr<PointSet> Create(size_t dim, double radius_bound,
                                         std::vector<double> coords);

  size_t size() const { return points_.size(); }
  size_t dim() const { return points_.dim(); }
  double radius_bound() const { return radius_bound_; }
  std::span<const double> operator[](size_t i) const { return points_[i]; }
  const VectorList& points() const { return points_; }

  PointSet Subset(std::span<const size_t> indices) const;

 private:
  PointSet(VectorList points, double radius_bound)
      : points_(std::move(points)), radius_bound_(radius_bound) {}

  VectorList points_;
  double radius_bound_ = 1.0;
};

// Points with finite weights. Negative weights are clamped to zero.
class WeightedPointSet {
 public:
  static absl::StatusOr<WeightedPointSet> Create(size_t dim,
                                                 std::vector<double> coords,
                                                 std::vector<double> weights);
  static WeightedPointSet Unit(const PointSet& points);

  size_t size() const { return weights_.size(); }
  size_t dim() const { return points_.dim(); }
  std::span<const double> point(size_t i) const { return points_[i]; }
  double weight(size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const VectorList& points() const { return points_; }
  double total_weight() const;
  // Number of entries with positive weight.
  size_t support_size() const;

 private:
  VectorList points_;
  std::vector<double> weights_;
};

// k >= 1 centers.
class CenterSet {
 public:
  static absl::StatusOr<CenterSet> Create(size_t dim,
                                          std::vector<double> coords);
  static absl::StatusOr<CenterSet> FromList(const VectorList& list);

  size_t k() const { return centers_.size(); }
  size_t dim() const { return centers_.dim(); }
  std::span<const double> operator[](size_t i) const { return centers_[i]; }
  const VectorList& centers() const { return centers_; }

 private:
  explicit CenterSet(VectorList c) : centers_(std::move(c)) {}
  VectorList centers_;
};

// Index of the nearest center; ties break to the lowest index.
size_t NearestCenter(std::span<const double> x, const VectorList& centers,
                     double* squared_distance = nullptr);

absl::StatusOr<double> Cost(const PointSet& points, const CenterSet& centers,
                            Objective p);
absl::StatusOr<double> Cost(const WeightedPointSet& points,
                            const CenterSet& centers, Objective p);

struct OptResult {
  CenterSet centers;
  std::vector<size_t> pool_indices;
  double cost;
};

// Exhaustive search for the best k-subset of a finite candidate pool.
// Refuses (RESOURCE_EXHAUSTED) when C(|pool|, k) exceeds 10^6. Ties go to the
// lexicographically smallest index tuple.
absl::StatusOr<OptResult> OptOracle(const WeightedPointSet& points, size_t k,
                                    Objective p, const VectorList& pool);
absl::StatusOr<OptResult> OptOracle(const PointSet& points, size_t k,
                                    Objective p, const VectorList& pool);

// d orthonormal vectors, stored row-wise.
class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;
  explicit OrthonormalBasis(VectorList vectors)
      : vectors_(std::move(vectors)) {}

  static OrthonormalBasis Identity(size_t d);

  size_t dim() const { return vectors_.dim(); }
  std::span<const double> vector(size_t i) const { return vectors_[i]; }
  const VectorList& vectors() const { return vectors_; }

  // Coordinates <x, z_i> for i = 0..d-1.
  std::vector<double> Project(std::span<const double> x) const;
  // sum_i coords[i] * z_i.
  std::vector<double> Unproject(std::span<const double> coords) const;
  // max |<z_i, z_j> - [i == j]|.
  double MaxGramDeviation() const;

 private:
  VectorList vectors_;
};

// Haar-random basis: QR of a d x d standard normal matrix with the sign of
// diag(R) fixed positive. d must be at least 1.
OrthonormalBasis RandomBasis(size_t d, Rng& rng);

// Number of points within distance radius (inclusive) of center.
size_t EnclosingCount(const PointSet& points, std::span<const double> center,
                      double radius);

}  // namespace ldpkm

#endif  // LDPKM_GEOMETRY_H_
