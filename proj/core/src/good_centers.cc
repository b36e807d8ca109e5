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

#include "ldpkm/good_centers.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "ldpkm/point_io.h"

namespace ldpkm {

size_t RepetitionCount(uint64_t n, double a, double beta) {
  const double m = 4.0 * std::pow(static_cast<double>(n), a) * std::log(1.0 / beta);
  return std::max<size_t>(1, static_cast<size_t>(std::ceil(m - 1e-9)));
}

double CandidateCap(uint64_t n, double a, double b, double beta, double t) {
  return 512.0 * std::pow(static_cast<double>(n), 1.0 + a + b) *
         std::log(1.0 / beta) / t;
}

double GoodCentersMinT(uint64_t n, size_t d, double a, double b,
                       double epsilon, double beta, double delta, double c_t) {
  const double nd = static_cast<double>(n);
  return c_t * std::pow(nd, 0.5 + a + b) * std::sqrt(static_cast<double>(d)) /
         epsilon * std::log(1.0 / beta) *
         std::log(d * nd / (beta * delta));
}

size_t GoodCentersOutput::candidate_count() const {
  size_t total = 0;
  for (const auto& rep : reps) total += rep.centers.size();
  return total;
}

std::string GoodCentersOutput::ToCsv(size_t dim) const {
  std::string out = "m,u";
  for (size_t j = 0; j < dim; ++j) absl::StrAppend(&out, ",x", j);
  out += ",surviving\n";
  for (size_t m = 0; m < reps.size(); ++m) {
    std::vector<uint64_t> values = reps[m].heavy_list;
    std::sort(values.begin(), values.end());
    for (uint64_t u : values) {
      absl::StrAppend(&out, m, ",", u);
      const ProcedureCenter* c = reps[m].Find(u);
      for (size_t j = 0; j < dim; ++j) {
        out += ",";
        if (c != nullptr) out += FormatDouble(c->center[j]);
      }
      absl::StrAppend(&out, ",", c != nullptr ? 1 : 0, "\n");
    }
  }
  return out;
}

absl::StatusOr<GoodCentersOutput> GoodCenters(ProtocolSession& session,
                                              const PointSet& points,
                                              const LshSpec& spec,
                                              const GoodCentersParams& params,
                                              Rng& rng) {
  const uint64_t n = points.size();
  const size_t d = points.dim();
  if (n == 0) return absl::InvalidArgumentError("empty point set");
  if (!(params.beta > 0.0 && params.beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  GoodCentersOutput out;
  out.M = params.repetitions > 0 ? params.repetitions
                                 : RepetitionCount(n, spec.a, params.beta);
  if (out.M > n) {
    return absl::FailedPreconditionError(
        absl::StrCat("M = ", out.M, " repetitions exceed n = ", n));
  }
  out.t_hat = params.t / (2.0 * out.M);
  out.beta_hat = params.beta / (7.0 * out.M);

  if (params.mode == Mode::kTheory) {
    const double nd = static_cast<double>(n);
    const double eps = params.budget.epsilon();
    const double delta = params.budget.delta();
    const double min_t = std::max(
        GoodCentersMinT(n, d, spec.a, spec.b, eps, params.beta, delta,
                        params.c_t),
        24.0 * out.M * std::log(std::exp(1.0) * out.M / params.beta));
    std::vector<std::string> failed;
    if (points.radius_bound() / params.r > nd * nd * nd) {
      failed.push_back("Lambda/r <= n^3");
    }
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

  // Shuffle, then contiguous blocks of floor(n/M); the remainder goes
  // round-robin.
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng part_rng = rng.Fork("partition");
  part_rng.Shuffle(order);
  const size_t block = n / out.M;
  out.parts.assign(out.M, {});
  out.rep_of_user.assign(n, 0);
  for (size_t j = 0; j < n; ++j) {
    const size_t m = j < block * out.M ? j / block : j - block * out.M;
    out.parts[m].push_back(order[j]);
    out.rep_of_user[order[j]] = static_cast<uint32_t>(m);
  }
  for (auto& part : out.parts) std::sort(part.begin(), part.end());

  ProcedureParams pp;
  pp.r = params.r;
  pp.t = out.t_hat;
  pp.beta = out.beta_hat;
  pp.budget = params.budget;
  // Theory preconditions are checked above for the whole run.
  pp.mode = Mode::kDesk;
  pp.thresholds = params.thresholds;
  pp.c_t = params.c_t;
  pp.max_list = params.max_list;
  pp.round_base = params.round_base;
  pp.max_bins = params.max_bins;
  pp.instrument = params.instrument;
  Rng rep_rng = rng.Fork("rep");
  for (size_t m = 0; m < out.M; ++m) {
    pp.channel = absl::StrCat(params.channel, ".m", m);
    Rng r = rep_rng.Fork(m);
    auto rep = CentersProcedure(session, points, out.parts[m], spec, pp, r);
    if (!rep.ok()) return rep.status();
    out.reps.push_back(*std::move(rep));
  }
  for (const auto& e : out.reps.front().spend) {
    out.spend.push_back(
        {e.step, e.budget,
         absl::StrCat(e.note, "; parallel over ", out.M, " disjoint parts")});
  }

  out.candidate_cap = CandidateCap(n, spec.a, spec.b, params.beta, params.t);
  while (out.candidate_count() > out.candidate_cap) {
    // Drop the survivor with the smallest validation estimate.
    size_t worst_m = 0, worst_j = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < out.M; ++m) {
      for (size_t j = 0; j < out.reps[m].centers.size(); ++j) {
        if (out.reps[m].centers[j].validate_estimate < worst) {
          worst = out.reps[m].centers[j].validate_estimate;
          worst_m = m;
          worst_j = j;
        }
      }
    }
    auto& cs = out.reps[worst_m].centers;
    cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(worst_j));
    ++out.trimmed;
  }
  return out;
}

}  // namespace ldpkm
