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

#include "ldpkm/centers_procedure.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "ldpkm/bytes.h"
#include "ldpkm/gaussian_mechanism.h"

namespace ldpkm {
namespace {

std::vector<uint8_t> EncodeList(std::span<const uint64_t> list) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(list.size()));
  for (uint64_t u : list) w.U64(u);
  return w.Take();
}

// True when no two of the points are at distance >= limit.
bool AllWithin(const PointSet& points, std::span<const uint32_t> members,
               double limit) {
  if (members.size() < 2) return true;
  const size_t d = points.dim();
  std::vector<double> mean(d, 0.0);
  for (uint32_t i : members) {
    for (size_t j = 0; j < d; ++j) mean[j] += points[i][j];
  }
  for (double& m : mean) m /= members.size();
  double far = 0.0;
  for (uint32_t i : members) far = std::max(far, Distance(points[i], mean));
  // The mean is in the convex hull, so some member is at least `far` from
  // the farthest one.
  if (far >= limit) return false;
  if (2.0 * far < limit) return true;
  const double l2 = limit * limit;
  for (size_t a = 0; a < members.size(); ++a) {
    for (size_t b = a + 1; b < members.size(); ++b) {
      if (SquaredDistance(points[members[a]], points[members[b]]) >= l2) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

IntervalGrid IntervalGrid::Make(double lambda, double length) {
  IntervalGrid g;
  g.lo = -2.0 * lambda;
  g.hi = 2.0 * lambda;
  g.length = length;
  g.count = static_cast<size_t>(
      std::max(1.0, std::ceil((g.hi - g.lo) / length - 1e-12)));
  return g;
}

size_t IntervalGrid::IndexOf(double v) const {
  const double j = std::floor((v - lo) / length);
  if (j < 0) return 0;
  return std::min(static_cast<size_t>(j), count - 1);
}

double IntervalLength(double r, double c, size_t d, uint64_t n, double beta) {
  const double dn = static_cast<double>(d) * static_cast<double>(n);
  return 2.0 * r * c * std::sqrt(std::log(dn / beta) / d);
}

double ProcedureMinT(uint64_t n, size_t d, double b, double epsilon,
                     double beta, double delta, double c_t) {
  const double nd = static_cast<double>(n);
  return c_t * std::pow(nd, 0.5 + b) * std::sqrt(static_cast<double>(d)) /
         epsilon * std::log(d * nd / (beta * delta));
}

const ProcedureCenter* ProcedureOutput::Find(uint64_t u) const {
  auto it = std::lower_bound(
      centers.begin(), centers.end(), u,
      [](const ProcedureCenter& c, uint64_t v) { return c.u < v; });
  return it != centers.end() && it->u == u ? &*it : nullptr;
}

HeavyValues SelectHeavy(const FrequencyEstimate& estimate, double threshold,
                        size_t cap) {
  HeavyValues h;
  const auto& bins = estimate.bin_estimates();
  std::vector<uint64_t> picked;
  for (uint32_t j = 0; j < bins.size(); ++j) {
    if (bins[j] >= threshold) picked.push_back(j);
  }
  h.before_trim = picked.size();
  std::stable_sort(picked.begin(), picked.end(), [&](uint64_t a, uint64_t b) {
    return bins[a] > bins[b];
  });
  if (picked.size() > cap) picked.resize(cap);
  h.list = picked;
  for (uint64_t u : picked) h.estimates.push_back(bins[u]);
  return h;
}

std::vector<Box> LocalizeBoxes(
    size_t d, size_t list_size, const IntervalGrid& grid,
    const std::function<double(size_t, uint64_t)>& counts) {
  std::vector<Box> boxes(list_size);
  for (size_t pos = 0; pos < list_size; ++pos) {
    boxes[pos].lo.resize(d);
    boxes[pos].hi.resize(d);
    for (size_t axis = 0; axis < d; ++axis) {
      size_t best = 0;
      double best_v = -std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < grid.count; ++j) {
        const double v = counts(axis, j * list_size + pos);
        if (v > best_v) {
          best_v = v;
          best = j;
        }
      }
      boxes[pos].lo[axis] = grid.Start(best) - grid.length;
      boxes[pos].hi[axis] = grid.End(best) + grid.length;
    }
  }
  return boxes;
}

absl::StatusOr<ProcedureOutput> CentersProcedure(
    ProtocolSession& session, const PointSet& points,
    std::span<const uint32_t> users, const LshSpec& spec,
    const ProcedureParams& params, Rng& rng) {
  const size_t d = points.dim();
  const uint64_t n = users.size();
  const double lambda = points.radius_bound();
  const double eps = params.budget.epsilon();
  const double delta = params.budget.delta();
  if (!(params.r > 0.0) || !(params.t > 0.0)) {
    return absl::InvalidArgumentError("r and t must be positive");
  }
  if (!(params.beta > 0.0 && params.beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (spec.dim != d) return absl::InvalidArgumentError("LSH dimension mismatch");
  if (!(delta > 0.0)) {
    return absl::InvalidArgumentError("the averaging step needs delta > 0");
  }
  if (params.mode == Mode::kTheory) {
    const double nd = static_cast<double>(spec.n);
    std::vector<std::string> failed;
    if (lambda / params.r > nd * nd * nd) failed.push_back("Lambda/r <= n^3");
    if (params.beta > std::pow(nd, -spec.a) / 28.0) {
      failed.push_back(absl::StrCat("beta <= n^-a/28 = ",
                                    std::pow(nd, -spec.a) / 28.0));
    }
    const double min_t =
        ProcedureMinT(n, d, spec.b, eps, params.beta, delta, params.c_t);
    if (params.t < min_t) {
      failed.push_back(absl::StrCat("t >= ", min_t, " (got ", params.t, ")"));
    }
    if (!failed.empty()) {
      std::string msg = "theory-mode preconditions failed:";
      for (const auto& f : failed) absl::StrAppend(&msg, " ", f, ";");
      absl::StrAppend(&msg, " minimum feasible t = ", min_t);
      return absl::FailedPreconditionError(msg);
    }
  }

  const PrivacyBudget quarter = params.budget.ScaledEpsilon(1, 4).WithoutDelta();
  const PrivacyBudget eighth = params.budget.ScaledEpsilon(1, 8).WithoutDelta();
  const PrivacyBudget eighth_delta = params.budget.ScaledEpsilon(1, 8);
  const double beta_part = params.beta / 7.0;
  const double level = params.t * spec.p_target;  // t * n^-b
  const std::string& ch = params.channel;
  const bool noise_off = session.options().noise_off;

  ProcedureOutput out;
  out.spend = {{"heavy", quarter, "frequency oracle"},
               {"localize", quarter, "frequency oracle; parts disjoint"},
               {"average.count", eighth, "frequency oracle"},
               {"average.vec", eighth_delta, "Gaussian"},
               {"validate", quarter, "frequency oracle"}};
  if (params.instrument) out.audit.emplace();

  // Step 1-2: hash and heavy values.
  Rng hash_rng = rng.Fork("hash");
  out.bucketizer.hash = HashFunction::Sample(spec, hash_rng);
  FrequencyOracleConfig fo;
  fo.domain_size = out.bucketizer.hash.universe();
  fo.epsilon = eps / 4.0;
  fo.hash_seed = rng.Fork("heavy.oracle").NextU64();
  fo.max_bins = params.max_bins;
  fo.noise_off = noise_off;
  auto heavy_oracle = UnaryFrequencyOracle::Create(fo);
  if (!heavy_oracle.ok()) return heavy_oracle.status();
  out.bucketizer.bins = heavy_oracle->bin_map();
  // Users report their hash value; u is its oracle bin.
  std::vector<uint64_t> hashed(n), value(n);
  for (size_t i = 0; i < n; ++i) {
    hashed[i] = out.bucketizer.hash(points[users[i]]);
    value[i] = out.bucketizer.bins(hashed[i]);
  }
  Rng heavy_rng = rng.Fork("heavy");
  FrequencyEstimate heavy_est = session.Histogram(
      params.round_base, ch + ".heavy", *heavy_oracle, users, hashed, beta_part,
      heavy_rng);
  double cap_d = params.thresholds.list_cap * static_cast<double>(n) / level;
  size_t cap = cap_d >= 1e18 ? SIZE_MAX : static_cast<size_t>(std::floor(cap_d));
  if (params.max_list > 0) cap = std::min(cap, params.max_list);
  HeavyValues heavy =
      SelectHeavy(heavy_est, params.thresholds.heavy_select * level, cap);
  out.heavy_list = heavy.list;
  {
    ByteWriter w;
    const auto blob = out.bucketizer.hash.Serialize();
    w.U32(static_cast<uint32_t>(blob.size()));
    w.Raw(blob);
    w.Raw(EncodeList(out.heavy_list));
    session.Broadcast(params.round_base + 1, ch + ".list", w.Take());
  }

  std::vector<uint64_t> true_counts;
  if (out.audit) {
    true_counts = heavy_oracle->BinCounts(hashed);
    out.audit->heavy_before_trim = heavy.before_trim;
    std::vector<bool> in_list(true_counts.size(), false);
    for (uint64_t u : heavy.list) in_list[u] = true;
    for (size_t u = 0; u < true_counts.size(); ++u) {
      if (true_counts[u] >= level / 16.0 && !in_list[u]) {
        out.audit->list_inclusion = false;
      }
    }
    for (size_t j = 0; j < heavy.list.size(); ++j) {
      const uint64_t u = heavy.list[j];
      if (true_counts[u] < level / 32.0) out.audit->list_membership = false;
      out.audit->rows.push_back({"heavy", absl::StrCat("f(", u, ")"),
                                 static_cast<double>(true_counts[u]),
                                 heavy.estimates[j]});
    }
  }
  if (out.heavy_list.empty()) return out;

  const size_t L = out.heavy_list.size();
  std::unordered_map<uint64_t, size_t> pos_of;
  for (size_t j = 0; j < L; ++j) pos_of[out.heavy_list[j]] = j;
  std::vector<int64_t> pos(n, -1);
  for (size_t i = 0; i < n; ++i) {
    auto it = pos_of.find(value[i]);
    if (it != pos_of.end()) pos[i] = static_cast<int64_t>(it->second);
  }

  // Steps 3-6: rotation, intervals, boxes.
  Rng basis_rng = rng.Fork("basis");
  out.basis = RandomBasis(d, basis_rng);
  const double p_len = params.thresholds.interval_scale *
                       IntervalLength(params.r, spec.c, d, n, beta_part);
  out.grid = IntervalGrid::Make(lambda, p_len);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng part_rng = rng.Fork("parts");
  part_rng.Shuffle(order);
  std::vector<uint32_t> part(n);
  for (size_t j = 0; j < n; ++j) part[order[j]] = static_cast<uint32_t>(j % d);
  std::vector<std::vector<double>> projected(n);
  for (size_t i = 0; i < n; ++i) {
    if (pos[i] >= 0) projected[i] = out.basis.Project(points[users[i]]);
  }
  std::vector<FrequencyEstimate> axis_est;
  axis_est.reserve(d);
  Rng loc_oracle_rng = rng.Fork("localize.oracle");
  Rng loc_rng = rng.Fork("localize");
  for (size_t axis = 0; axis < d; ++axis) {
    std::vector<uint32_t> ids;
    std::vector<uint64_t> items;
    for (size_t i = 0; i < n; ++i) {
      if (part[i] != axis) continue;
      ids.push_back(users[i]);
      items.push_back(pos[i] < 0 ? kNullItem
                                 : out.grid.IndexOf(projected[i][axis]) * L +
                                       static_cast<uint64_t>(pos[i]));
    }
    FrequencyOracleConfig afo;
    afo.domain_size = out.grid.count * L;
    afo.epsilon = eps / 4.0;
    afo.hash_seed = loc_oracle_rng.Fork(axis).NextU64();
    afo.max_bins = params.max_bins;
    afo.noise_off = noise_off;
    auto oracle = UnaryFrequencyOracle::Create(afo);
    if (!oracle.ok()) return oracle.status();
    Rng axis_rng = loc_rng.Fork(axis);
    axis_est.push_back(session.Histogram(params.round_base + 1,
                                         absl::StrCat(ch, ".axis", axis),
                                         *oracle, ids, items, beta_part,
                                         axis_rng));
  }
  const std::vector<Box> boxes = LocalizeBoxes(
      d, L, out.grid,
      [&](size_t axis, uint64_t code) { return axis_est[axis](code); });

  // Step 7: private averages inside the boxes.
  std::vector<Region> regions(L);
  std::vector<double> box_diam(L);
  for (size_t j = 0; j < L; ++j) {
    Region& reg = regions[j];
    reg.key = out.heavy_list[j];
    reg.lo = boxes[j].lo;
    reg.hi = boxes[j].hi;
    std::vector<double> mid(d);
    double half2 = 0.0;
    for (size_t a = 0; a < d; ++a) {
      mid[a] = 0.5 * (reg.lo[a] + reg.hi[a]);
      const double h = 0.5 * (reg.hi[a] - reg.lo[a]);
      half2 += h * h;
    }
    box_diam[j] = 2.0 * std::sqrt(half2);
    if (std::sqrt(half2) <= lambda) {
      reg.reference = out.basis.Unproject(mid);
      reg.radius = std::sqrt(half2);
    } else {
      reg.reference.assign(d, 0.0);
      reg.radius = lambda;
    }
  }
  std::vector<int64_t> region_of(n, -1);
  for (size_t i = 0; i < n; ++i) {
    if (pos[i] < 0) continue;
    const Box& b = boxes[pos[i]];
    bool inside = true;
    for (size_t a = 0; a < d && inside; ++a) {
      inside = projected[i][a] >= b.lo[a] && projected[i][a] <= b.hi[a];
    }
    if (inside) region_of[i] = pos[i];
  }
  auto partition = RegionPartition::Create(regions, out.basis);
  if (!partition.ok()) return partition.status();
  LdpAvgParams avg_params;
  avg_params.epsilon = eps / 4.0;
  avg_params.delta = delta;
  avg_params.beta = beta_part;
  avg_params.sigma_multiplier = params.thresholds.sigma_multiplier;
  avg_params.reliability_multiplier = params.thresholds.reliability;
  avg_params.oracle_seed = rng.Fork("average.oracle").NextU64();
  avg_params.max_bins = params.max_bins;
  Rng avg_rng = rng.Fork("average");
  auto avg = LdpAvg(session, params.round_base + 2, ch + ".avg", points, users,
                    region_of, *partition, avg_params, avg_rng);
  if (!avg.ok()) return avg.status();

  std::vector<size_t> alive;
  for (size_t j = 0; j < L; ++j) {
    if ((*avg)[j].reliable) alive.push_back(j);
  }
  {
    ByteWriter w;
    w.U32(static_cast<uint32_t>(alive.size()));
    for (size_t j : alive) {
      w.U64(out.heavy_list[j]);
      for (double v : (*avg)[j].mean) w.F64(v);
    }
    session.Broadcast(params.round_base + 3, ch + ".centers", w.Take());
  }

  // Step 8: validation.
  std::vector<int64_t> alive_pos(L, -1);
  for (size_t k = 0; k < alive.size(); ++k) alive_pos[alive[k]] = k;
  const double capture = params.thresholds.capture * spec.c * params.r;
  std::vector<uint64_t> near(n, kNullItem);
  for (size_t i = 0; i < n; ++i) {
    if (pos[i] < 0 || alive_pos[pos[i]] < 0) continue;
    if (Distance(points[users[i]], (*avg)[pos[i]].mean) <= capture) {
      near[i] = static_cast<uint64_t>(alive_pos[pos[i]]);
    }
  }
  std::vector<double> v_hat(alive.size(), 0.0);
  if (!alive.empty()) {
    FrequencyOracleConfig vfo;
    vfo.domain_size = alive.size();
    vfo.epsilon = eps / 4.0;
    vfo.hash_seed = rng.Fork("validate.oracle").NextU64();
    vfo.max_bins = params.max_bins;
    vfo.noise_off = noise_off;
    auto oracle = UnaryFrequencyOracle::Create(vfo);
    if (!oracle.ok()) return oracle.status();
    Rng val_rng = rng.Fork("validate");
    FrequencyEstimate est =
        session.Histogram(params.round_base + 3, ch + ".validate", *oracle,
                          users, near, beta_part, val_rng);
    for (size_t k = 0; k < alive.size(); ++k) v_hat[k] = est(k);
  }
  const double keep_above = params.thresholds.validate * level;
  for (size_t k = 0; k < alive.size(); ++k) {
    if (v_hat[k] <= keep_above) continue;
    const size_t j = alive[k];
    ProcedureCenter c;
    c.u = out.heavy_list[j];
    c.center = (*avg)[j].mean;
    c.box_lo = boxes[j].lo;
    c.box_hi = boxes[j].hi;
    c.box_diameter = box_diam[j];
    c.count_estimate = (*avg)[j].count_estimate;
    c.validate_estimate = v_hat[k];
    out.centers.push_back(std::move(c));
  }
  std::sort(out.centers.begin(), out.centers.end(),
            [](const ProcedureCenter& a, const ProcedureCenter& b) {
              return a.u < b.u;
            });

  if (out.audit) {
    ProcedureAudit& au = *out.audit;
    std::vector<std::vector<uint32_t>> members(L);
    std::vector<size_t> in_box(L, 0), v_true(L, 0);
    std::vector<std::vector<double>> box_sum(L, std::vector<double>(d, 0.0));
    for (size_t i = 0; i < n; ++i) {
      if (pos[i] < 0) continue;
      members[pos[i]].push_back(users[i]);
      if (region_of[i] >= 0) {
        ++in_box[pos[i]];
        for (size_t a = 0; a < d; ++a) box_sum[pos[i]][a] += points[users[i]][a];
      }
      if (near[i] != kNullItem) ++v_true[pos[i]];
    }
    for (size_t j = 0; j < L; ++j) {
      au.max_box_diameter = std::max(au.max_box_diameter, box_diam[j]);
      au.rows.push_back({"localize", absl::StrCat("in_box(", out.heavy_list[j], ")"),
                         static_cast<double>(members[j].size()),
                         static_cast<double>(in_box[j])});
      au.rows.push_back({"average", absl::StrCat("count(", out.heavy_list[j], ")"),
                         static_cast<double>(in_box[j]), (*avg)[j].count_estimate});
      if (in_box[j] > 0 && (*avg)[j].reliable) {
        for (double& s : box_sum[j]) s /= in_box[j];
        au.rows.push_back({"average",
                           absl::StrCat("center_error(", out.heavy_list[j], ")"),
                           0.0, Distance(box_sum[j], (*avg)[j].mean)});
      }
    }
    for (size_t k = 0; k < alive.size(); ++k) {
      au.rows.push_back({"validate", absl::StrCat("v(", out.heavy_list[alive[k]], ")"),
                         static_cast<double>(v_true[alive[k]]), v_hat[k]});
    }
    for (const auto& c : out.centers) {
      const size_t j = pos_of[c.u];
      if (v_true[j] < level / 8.0) au.survivor_counts = false;
      if (!AllWithin(points, members[j], spec.c * params.r)) {
        au.e1_on_survivors = false;
      }
    }
  }
  return out;
}

}  // namespace ldpkm
