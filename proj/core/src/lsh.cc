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

#include "ldpkm/lsh.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "ldpkm/bytes.h"

namespace ldpkm {
namespace {

constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;
constexpr char kBlobTag[] = "LSH1";

// Collision probability as a function of t = width / distance.
double ProbabilityAtRatio(double t) {
  if (t <= 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return std::erf(t / std::sqrt(2.0)) -
         std::sqrt(2.0 / M_PI) / t * (-std::expm1(-t * t / 2.0));
}

// Inverse of ProbabilityAtRatio on (0, 1).
double RatioForProbability(double p) {
  double lo = 0.0, hi = 1.0;
  while (ProbabilityAtRatio(hi) < p) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ProbabilityAtRatio(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

uint64_t MulMod61(uint64_t a, uint64_t b) {
  const unsigned __int128 m = static_cast<unsigned __int128>(a) * b;
  uint64_t r = static_cast<uint64_t>(m & kMersenne61) +
               static_cast<uint64_t>(m >> 61);
  r = (r & kMersenne61) + (r >> 61);
  return r >= kMersenne61 ? r - kMersenne61 : r;
}

uint32_t UniverseBits(uint64_t n) {
  const double bits = std::floor(3.0 * std::log2(static_cast<double>(n)));
  return static_cast<uint32_t>(std::clamp(bits, 1.0, 63.0));
}

absl::StatusOr<LshSpec> Search(size_t d, uint64_t n, double r, double p_target,
                               double q_target, const FamilyOptions& options) {
  if (d == 0) return absl::InvalidArgumentError("d must be positive");
  if (n < 2) return absl::InvalidArgumentError("n must be at least 2");
  if (!(r > 0.0)) return absl::InvalidArgumentError("r must be positive");
  if (!(q_target >= 0.0 && q_target < p_target && p_target <= 1.0)) {
    return absl::InvalidArgumentError("need 0 <= q_target < p_target <= 1");
  }
  const double p_design = std::min(p_target * (1.0 + options.p_margin), 1.0);
  if (p_design >= 1.0 || q_target <= 0.0) {
    return absl::FailedPreconditionError(
        "targets need p < 1 and q > 0 for a projection family");
  }
  LshSpec best;
  best.c = std::numeric_limits<double>::infinity();
  for (uint32_t K = 1; K <= options.max_k; ++K) {
    const double t_r = RatioForProbability(std::pow(p_design, 1.0 / K));
    const double t_cr = RatioForProbability(std::pow(q_target, 1.0 / K));
    const double c = t_r / t_cr;
    if (c < best.c) {
      best.K = K;
      best.c = c;
      best.width = t_r * r;
    }
  }
  if (!(best.c > 1.0) || best.c > options.max_c) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no (K, w) with K <= ", options.max_k, " reaches c <= ", options.max_c,
        " (best c = ", best.c, ")"));
  }
  best.dim = d;
  best.n = n;
  best.r = r;
  best.p_target = p_target;
  best.q_target = q_target;
  best.universe_bits = UniverseBits(n);
  const double ln_n = std::log(static_cast<double>(n));
  best.b = -std::log(p_target) / ln_n;
  best.a = -std::log(q_target) / ln_n - 2.0;
  return best;
}

}  // namespace

uint64_t LshSpec::universe() const { return uint64_t{1} << universe_bits; }

double LshSpec::CollisionProbability(double distance) const {
  return std::pow(BaseCollisionProbability(distance, width), K);
}

double BaseCollisionProbability(double distance, double width) {
  if (distance <= 0.0) return 1.0;
  return ProbabilityAtRatio(width / distance);
}

absl::StatusOr<LshSpec> BuildFamily(size_t d, uint64_t n, double r, double a,
                                    double b, const FamilyOptions& options) {
  if (!(a > b && b > 0.0)) return absl::InvalidArgumentError("need a > b > 0");
  const double nd = static_cast<double>(n);
  auto spec = Search(d, n, r, std::pow(nd, -b), std::pow(nd, -2.0 - a), options);
  if (spec.ok()) {
    spec->a = a;
    spec->b = b;
  }
  return spec;
}

absl::StatusOr<LshSpec> BuildRelaxedFamily(size_t d, uint64_t n, double r,
                                           double p_target, double q_target,
                                           const FamilyOptions& options) {
  auto spec = Search(d, n, r, p_target, q_target, options);
  if (spec.ok()) spec->relaxed = true;
  return spec;
}

HashFunction HashFunction::Sample(const LshSpec& spec, Rng& rng) {
  HashFunction h;
  h.dim_ = spec.dim;
  h.K_ = spec.K;
  h.width_ = spec.width;
  h.bits_ = spec.universe_bits;
  h.directions_.resize(spec.K * spec.dim);
  for (double& g : h.directions_) g = rng.Normal();
  h.offsets_.resize(spec.K);
  for (double& u : h.offsets_) u = rng.Uniform(0.0, spec.width);
  h.tuple_base_ = 1 + rng.UniformInt(kMersenne61 - 1);
  h.mult_hi_ = rng.NextU64();
  h.mult_lo_ = rng.NextU64();
  h.add_hi_ = rng.NextU64();
  h.add_lo_ = rng.NextU64();
  return h;
}

std::vector<int64_t> HashFunction::Buckets(std::span<const double> x) const {
  std::vector<int64_t> out(K_);
  for (uint32_t k = 0; k < K_; ++k) {
    double dot = 0.0;
    const double* g = directions_.data() + k * dim_;
    for (size_t j = 0; j < dim_; ++j) dot += g[j] * x[j];
    out[k] = static_cast<int64_t>(std::floor((dot + offsets_[k]) / width_));
  }
  return out;
}

uint64_t HashFunction::Compress(std::span<const int64_t> buckets) const {
  // Polynomial fingerprint of the tuple mod 2^61 - 1, then multiply-shift.
  uint64_t key = 0;
  for (int64_t b : buckets) {
    const uint64_t v = static_cast<uint64_t>(b) % kMersenne61;
    key = MulMod61(key, tuple_base_) + v;
    if (key >= kMersenne61) key -= kMersenne61;
  }
  const unsigned __int128 mult =
      (static_cast<unsigned __int128>(mult_hi_) << 64) | mult_lo_;
  const unsigned __int128 add =
      (static_cast<unsigned __int128>(add_hi_) << 64) | add_lo_;
  return static_cast<uint64_t>((mult * key + add) >> (128 - bits_));
}

uint64_t HashFunction::operator()(std::span<const double> x) const {
  return Compress(Buckets(x));
}

std::vector<uint8_t> HashFunction::Serialize() const {
  ByteWriter w;
  w.Str(kBlobTag);
  w.U32(static_cast<uint32_t>(dim_));
  w.U32(K_);
  w.F64(width_);
  w.U32(bits_);
  for (double g : directions_) w.F64(g);
  for (double u : offsets_) w.F64(u);
  w.U64(tuple_base_);
  w.U64(mult_hi_);
  w.U64(mult_lo_);
  w.U64(add_hi_);
  w.U64(add_lo_);
  return w.Take();
}

absl::StatusOr<HashFunction> HashFunction::Deserialize(
    std::span<const uint8_t> blob) {
  ByteReader r(blob);
  if (r.Str(4) != kBlobTag) return absl::InvalidArgumentError("missing LSH1 tag");
  HashFunction h;
  h.dim_ = r.U32();
  h.K_ = r.U32();
  h.width_ = r.F64();
  h.bits_ = r.U32();
  if (!r.ok() || h.bits_ == 0 || h.bits_ > 63 ||
      r.remaining() != 8 * (h.K_ * h.dim_ + h.K_ + 5)) {
    return absl::InvalidArgumentError("malformed LSH1 blob");
  }
  h.directions_.resize(h.K_ * h.dim_);
  for (double& g : h.directions_) g = r.F64();
  h.offsets_.resize(h.K_);
  for (double& u : h.offsets_) u = r.F64();
  h.tuple_base_ = r.U64();
  h.mult_hi_ = r.U64();
  h.mult_lo_ = r.U64();
  h.add_hi_ = r.U64();
  h.add_lo_ = r.U64();
  return h;
}

CollisionEstimate MakeEstimate(uint64_t successes, uint64_t trials, double z) {
  CollisionEstimate e;
  e.collisions = successes;
  e.trials = trials;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  e.estimate = p;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  e.low = std::max(0.0, center - half);
  e.high = std::min(1.0, center + half);
  return e;
}

namespace {

// A point at exactly `distance` from the origin in a uniform direction.
std::vector<double> OffsetPoint(size_t d, double distance, Rng& rng) {
  std::vector<double> v(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.Normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double s = distance / std::sqrt(norm2);
  for (double& x : v) x *= s;
  return v;
}

}  // namespace

CollisionEstimate EstimateCollision(const LshSpec& spec, double distance,
                                    uint64_t trials, Rng& rng,
                                    bool compressed) {
  const std::vector<double> origin(spec.dim, 0.0);
  uint64_t hits = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    Rng trial = rng.Fork(t);
    HashFunction h = HashFunction::Sample(spec, trial);
    const std::vector<double> y = OffsetPoint(spec.dim, distance, trial);
    if (compressed) {
      hits += h(origin) == h(y);
    } else {
      hits += h.Buckets(origin) == h.Buckets(y);
    }
  }
  return MakeEstimate(hits, trials);
}

std::vector<uint64_t> CollisionProfile(const LshSpec& spec, double distance,
                                       uint64_t trials, Rng& rng) {
  const std::vector<double> origin(spec.dim, 0.0);
  std::vector<uint64_t> counts(spec.K, 0);
  for (uint64_t t = 0; t < trials; ++t) {
    Rng trial = rng.Fork(t);
    HashFunction h = HashFunction::Sample(spec, trial);
    const std::vector<double> y = OffsetPoint(spec.dim, distance, trial);
    const auto a = h.Buckets(origin);
    const auto b = h.Buckets(y);
    for (uint32_t k = 0; k < spec.K && a[k] == b[k]; ++k) ++counts[k];
  }
  return counts;
}

}  // namespace ldpkm
