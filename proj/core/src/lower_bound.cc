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

#include "ldpkm/lower_bound.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "ldpkm/point_io.h"

namespace ldpkm {

GapTrValue GapTr(std::span<const uint8_t> bits, double tau) {
  size_t ones = 0;
  for (uint8_t b : bits) ones += b != 0;
  if (ones == 0) return GapTrValue::kZero;
  if (static_cast<double>(ones) >= tau) return GapTrValue::kOne;
  return GapTrValue::kUndefined;
}

absl::StatusOr<ProtocolBResult> ProtocolB(std::span<const uint8_t> bits,
                                          const ClusteringProtocol& protocol,
                                          double beta_const, Objective p,
                                          Rng& rng) {
  if (!(beta_const > 0.0 && beta_const <= 1.0)) {
    return absl::InvalidArgumentError("beta_const must lie in (0, 1]");
  }
  if (bits.empty()) return absl::InvalidArgumentError("no users");
  const double r = beta_const / 4.0;
  const size_t count = static_cast<size_t>(std::ceil(1.0 / r - 1e-9));
  ProtocolBResult out;
  Rng server = rng.Fork("interval");
  out.interval = server.UniformInt(count);
  out.lo = out.interval * r;
  out.hi = std::min(1.0, (out.interval + 1) * r);
  out.mu = 0.5 * (out.lo + out.hi);

  std::vector<double> coords(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) coords[i] = bits[i] ? out.mu : 0.0;
  auto points = PointSet::Create(1, 1.0, coords);
  if (!points.ok()) return points.status();
  Rng inner = rng.Fork("inner");
  auto centers = protocol(*points, inner);
  if (centers.ok()) {
    out.centers = *std::move(centers);
  } else if (absl::IsFailedPrecondition(centers.status())) {
    out.inner_refused = true;
    out.centers = VectorList(1, {0.0, 0.0});
  } else {
    return centers.status();
  }
  for (size_t j = 0; j < out.centers.size(); ++j) {
    const double c = out.centers[j][0];
    if (c >= out.lo && c <= out.hi) out.output = 1;
  }
  auto set = CenterSet::FromList(out.centers);
  if (!set.ok()) return set.status();
  auto cost = Cost(*points, *set, p);
  if (!cost.ok()) return cost.status();
  out.cost = *cost;
  return out;
}

ClusteringProtocol ObliviousProtocol() {
  return [](const PointSet&, Rng& rng) -> absl::StatusOr<VectorList> {
    return VectorList(1, {rng.Uniform(), rng.Uniform()});
  };
}

ClusteringProtocol PipelineProtocol(PipelineConfig config) {
  config.k = 2;
  return [config](const PointSet& points,
                  Rng& rng) -> absl::StatusOr<VectorList> {
    auto res = WeightedCenters(points, config, rng);
    if (!res.ok()) return res.status();
    return res->solve->centers.centers();
  };
}

absl::StatusOr<std::vector<FloorRow>> FloorExperiment(
    const FloorOptions& options, const ClusteringProtocol& protocol, Rng& rng) {
  std::vector<FloorRow> rows;
  const double r = options.beta_const / 4.0;
  const double half_pow = std::pow(r / 2.0, Exponent(options.p));
  for (uint64_t n : options.n_grid) {
    for (double mult : options.tau_multipliers) {
      const double tau = std::ceil(mult * std::sqrt(static_cast<double>(n)));
      if (tau <= 0.0) continue;  // GAP-TR is undefined for tau = 0
      for (const char* instance : {"zero", "tau"}) {
        const bool ones = std::string(instance) == "tau";
        std::vector<uint8_t> bits(n, 0);
        // tau may exceed n on tiny grids; all users then hold a one.
        const size_t m = ones ? std::min<uint64_t>(n, static_cast<uint64_t>(tau)) : 0;
        std::fill(bits.begin(), bits.begin() + m, 1);
        FloorRow row;
        row.n = n;
        row.tau = tau;
        row.instance = instance;
        row.trials = options.trials;
        std::vector<double> costs;
        Rng cell = rng.Fork(absl::StrCat("n", n, ".tau", tau, ".", instance));
        for (size_t trial = 0; trial < options.trials; ++trial) {
          Rng tr = cell.Fork(trial);
          auto res = ProtocolB(bits, protocol, options.beta_const, options.p, tr);
          if (!res.ok()) return res.status();
          const int truth = ones ? 1 : 0;
          row.refusals += res->inner_refused;
          costs.push_back(res->cost);
          if (res->output != truth) {
            ++row.errors;
            if (ones && res->cost < half_pow * m * (1.0 - 1e-12)) {
              ++row.cost_bound_violations;
            }
          }
        }
        const double t = static_cast<double>(costs.size());
        double mean = 0.0, var = 0.0;
        for (double c : costs) mean += c;
        mean /= t;
        for (double c : costs) var += (c - mean) * (c - mean);
        var = t > 1 ? var / (t - 1) : 0.0;
        const double half = 1.959963984540054 * std::sqrt(var / t);
        row.decision_error_rate = row.errors / t;
        row.mean_cost = mean;
        row.ci_low = mean - half;
        row.ci_high = mean + half;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string FloorCsv(std::span<const FloorRow> rows) {
  std::string out =
      "n,tau,instance,decision_error_rate,mean_cost,ci95_low,ci95_high\n";
  for (const auto& r : rows) {
    absl::StrAppend(&out, r.n, ",", FormatDouble(r.tau), ",", r.instance, ",",
                    FormatDouble(r.decision_error_rate), ",",
                    FormatDouble(r.mean_cost), ",", FormatDouble(r.ci_low), ",",
                    FormatDouble(r.ci_high), "\n");
  }
  return out;
}

}  // namespace ldpkm
