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

#include "ldpkm/weighted_centers.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "ldpkm/bytes.h"
#include "ldpkm/point_io.h"

namespace ldpkm {
namespace {

absl::StatusOr<PrivacyBudget> Fraction(const Rational& eps, const Rational& del,
                                       const Rational& share_eps,
                                       const Rational& share_del) {
  return PrivacyBudget::Create(Rational(eps * share_eps),
                               Rational(del * share_del));
}

}  // namespace

std::vector<double> RadiusGrid(double top, size_t levels) {
  std::vector<double> radii(levels);
  for (size_t j = 0; j < levels; ++j) radii[j] = std::ldexp(top, -static_cast<int>(j));
  return radii;
}

size_t LogRadiusCount(uint64_t n) {
  size_t l = 0;
  while (l < 64 && (uint64_t{1} << l) < n) ++l;
  return std::max<size_t>(1, l);
}

double CandidateThresholdW(double c_W, size_t d, uint64_t n, double a,
                           double epsilon, double beta, double delta) {
  const double nd = static_cast<double>(n);
  return c_W * std::sqrt(static_cast<double>(d)) / epsilon *
         std::pow(nd, 0.5 + a) * std::log(1.0 / beta) *
         std::log(d * nd / delta);
}

Assigner::Assigner(const std::vector<GoodCentersOutput>* sweep,
                   std::vector<LshSpec> specs, std::vector<double> radii,
                   double capture)
    : sweep_(sweep),
      specs_(std::move(specs)),
      radii_(std::move(radii)),
      capture_(capture) {
  size_t dim = specs_.empty() ? 0 : specs_.front().dim;
  centers_ = VectorList(dim);
  for (size_t ri = 0; ri < sweep_->size(); ++ri) {
    const auto& gc = (*sweep_)[ri];
    for (size_t m = 0; m < gc.reps.size(); ++m) {
      for (const auto& c : gc.reps[m].centers) {
        ids_.push_back({static_cast<uint32_t>(ri), static_cast<uint32_t>(m), c.u});
        centers_.Append(c.center);
        radius_of_.push_back(static_cast<uint32_t>(ri));
      }
    }
  }
}

Assigner::Creation Assigner::Creates(std::span<const double> x,
                                     uint32_t user) const {
  Creation out;
  for (size_t ri = sweep_->size(); ri-- > 0;) {
    const auto& gc = (*sweep_)[ri];
    const uint32_t m = gc.rep_of_user[user];
    const ProcedureOutput& rep = gc.reps[m];
    if (rep.centers.empty()) continue;
    const uint64_t u = rep.bucketizer(x);
    const ProcedureCenter* c = rep.Find(u);
    if (c == nullptr) continue;
    if (Distance(x, c->center) > capture_ * specs_[ri].c * radii_[ri]) continue;
    const CandidateId id{static_cast<uint32_t>(ri), m, u};
    out.radius = static_cast<int64_t>(ri);
    out.candidate = std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin();
    return out;
  }
  return out;
}

size_t Assigner::AssignA(std::span<const double> x, uint32_t user,
                         Creation* creation) const {
  const Creation cr = Creates(x, user);
  if (creation != nullptr) *creation = cr;
  if (cr.radius < 0) return NearestCenter(x, centers_);
  // Candidates at strictly smaller radii form a suffix of the id order.
  const size_t start = std::upper_bound(radius_of_.begin(), radius_of_.end(),
                                        static_cast<uint32_t>(cr.radius)) -
                       radius_of_.begin();
  const size_t created = static_cast<size_t>(cr.candidate);
  if (start == ids_.size()) return created;
  size_t best = start;
  double best_d = SquaredDistance(x, centers_[start]);
  for (size_t j = start + 1; j < ids_.size(); ++j) {
    const double dj = SquaredDistance(x, centers_[j]);
    if (dj < best_d) {
      best_d = dj;
      best = j;
    }
  }
  return best_d < SquaredDistance(x, centers_[created]) ? best : created;
}

size_t AssignB(std::span<const double> x, size_t a,
               const std::vector<bool>& in_w,
               std::span<const size_t> w_members, const VectorList& w_centers) {
  if (in_w[a]) return a;
  return w_members[NearestCenter(x, w_centers)];
}

std::string PipelineResult::CandidatesCsv() const {
  const size_t d = candidates.empty() ? 0 : candidates.front().center.size();
  std::string out = "radius_index,m,u,radius";
  for (size_t j = 0; j < d; ++j) absl::StrAppend(&out, ",x", j);
  out += ",a_hat,in_w,b_hat\n";
  for (const auto& c : candidates) {
    absl::StrAppend(&out, c.id.radius, ",", c.id.m, ",", c.id.u, ",",
                    FormatDouble(c.radius));
    for (double v : c.center) absl::StrAppend(&out, ",", FormatDouble(v));
    absl::StrAppend(&out, ",", FormatDouble(c.a_hat), ",", c.in_w ? 1 : 0, ",",
                    c.in_w ? FormatDouble(c.b_hat) : "", "\n");
  }
  return out;
}

std::string PipelineResult::CentersCsv() const {
  const size_t d = solve->centers.dim();
  std::string out;
  for (size_t j = 0; j < d; ++j) absl::StrAppend(&out, j ? ",x" : "x", j);
  out += "\n";
  for (size_t i = 0; i < solve->centers.k(); ++i) {
    for (size_t j = 0; j < d; ++j) {
      absl::StrAppend(&out, j ? "," : "", FormatDouble(solve->centers[i][j]));
    }
    out += "\n";
  }
  return out;
}

absl::Status ValidatePipelineConfig(const PipelineConfig& c) {
  if (c.k < 1) return absl::InvalidArgumentError("k must be at least 1");
  if (!(c.epsilon > 0.0)) return absl::InvalidArgumentError("epsilon must be positive");
  if (!(c.delta > 0.0 && c.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(c.beta > 0.0 && c.beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (!(c.a > c.b && c.b > 0.0)) {
    return absl::InvalidArgumentError("exponents must satisfy a > b > 0");
  }
  if (c.share_sweep <= 0 || c.share_weights_a <= 0 || c.share_weights_b <= 0) {
    return absl::InvalidArgumentError("budget shares must be positive");
  }
  if (c.radius_top < 0.0) return absl::InvalidArgumentError("radius_top < 0");
  if (c.relaxed_lsh && !(c.lsh_p > c.lsh_q && c.lsh_q > 0.0 && c.lsh_p < 1.0)) {
    return absl::InvalidArgumentError("relaxed LSH needs 1 > p > q > 0");
  }
  return ValidateSolverConfig(c.solver);
}

absl::StatusOr<PipelineResult> WeightedCenters(const PointSet& points,
                                               const PipelineConfig& config,
                                               Rng& rng,
                                               ProtocolTranscript* transcript) {
  if (auto s = ValidatePipelineConfig(config); !s.ok()) return s;
  const uint64_t n = points.size();
  const size_t d = points.dim();
  const double lambda = points.radius_bound();
  if (n < 2) return absl::FailedPreconditionError("need at least 2 users");
  const bool theory = config.mode == Mode::kTheory;
  ProtocolSession session(config.simulation, transcript);
  PipelineResult res;

  const size_t log_n = LogRadiusCount(n);
  const double top = theory || config.radius_top == 0.0 ? lambda : config.radius_top;
  const size_t levels =
      theory || config.radius_levels == 0 ? log_n + 1 : config.radius_levels;
  res.radii = RadiusGrid(top, levels);
  if (!(res.radii.back() > lambda * 64.0 * DBL_EPSILON)) {
    return absl::FailedPreconditionError(
        "smallest radius is below floating-point resolution of Lambda");
  }
  const size_t R = res.radii.size();

  auto total = PrivacyBudget::Create(config.epsilon, config.delta);
  if (!total.ok()) return total.status();
  const Rational& eps = total->exact_epsilon();
  const Rational& del = total->exact_delta();
  Rational s_sweep, s_a, s_b;
  if (theory) {
    s_sweep = Rational(1, 4 * static_cast<int64_t>(log_n)) * R;
    s_a = s_b = Rational(1, 4);
  } else {
    s_sweep = ExactRational(config.share_sweep);
    s_a = ExactRational(config.share_weights_a);
    s_b = ExactRational(config.share_weights_b);
    const Rational sum = s_sweep + s_a + s_b;
    if (sum > 1) {
      s_sweep /= sum;
      s_a /= sum;
      s_b /= sum;
    }
  }
  auto sweep_budget = Fraction(eps, del, s_sweep / R, Rational(1, static_cast<int64_t>(R)));
  auto budget_a = Fraction(eps, del, s_a, 0);
  auto budget_b = Fraction(eps, del, s_b, 0);
  if (!sweep_budget.ok()) return sweep_budget.status();
  if (!budget_a.ok()) return budget_a.status();
  if (!budget_b.ok()) return budget_b.status();
  const double eps_r = sweep_budget->epsilon();
  const double delta_r = sweep_budget->delta();
  const double beta_r = config.beta / R;

  for (double r : res.radii) {
    auto spec = config.relaxed_lsh
                    ? BuildRelaxedFamily(d, n, r, config.lsh_p, config.lsh_q,
                                         config.lsh)
                    : BuildFamily(d, n, r, config.a, config.b, config.lsh);
    if (!spec.ok()) return spec.status();
    spec->a = config.a;
    spec->b = config.b;
    res.specs.push_back(*spec);
  }
  const size_t M = config.repetitions > 0
                       ? config.repetitions
                       : RepetitionCount(n, config.a, beta_r);
  const double formula_t = std::max(
      GoodCentersMinT(n, d, config.a, config.b, eps_r, beta_r, delta_r,
                      config.c_t),
      24.0 * M * std::log(std::exp(1.0) * M / beta_r));
  res.t = !theory && config.t > 0.0 ? config.t : formula_t;
  if (theory && res.t > static_cast<double>(n)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "theory-mode candidate threshold t = ", res.t, " exceeds n = ", n,
        "; minimum feasible t = ", formula_t));
  }

  // Step 1.
  GoodCentersParams gp;
  gp.t = res.t;
  gp.beta = beta_r;
  gp.budget = *sweep_budget;
  gp.mode = config.mode;
  gp.thresholds = config.thresholds;
  gp.c_t = config.c_t;
  gp.repetitions = config.repetitions;
  gp.max_list = config.max_list;
  gp.round_base = 0;
  gp.max_bins = config.max_bins;
  gp.instrument = config.instrument;
  Rng sweep_rng = rng.Fork("sweep");
  for (size_t ri = 0; ri < R; ++ri) {
    gp.r = res.radii[ri];
    gp.channel = absl::StrCat("r", ri);
    Rng r_rng = sweep_rng.Fork(ri);
    auto gc = GoodCenters(session, points, res.specs[ri], gp, r_rng);
    if (!gc.ok()) return gc.status();
    res.ledger.ChargeAll(absl::StrCat("sweep.r", ri, "."), gc->spend);
    res.sweep.push_back(*std::move(gc));
  }

  const Assigner assigner(&res.sweep, res.specs, res.radii,
                          config.thresholds.capture);
  const size_t Y = assigner.size();
  if (Y == 0) {
    return absl::FailedPreconditionError(
        "no candidate center survived at any radius");
  }
  for (size_t j = 0; j < Y; ++j) {
    Candidate c;
    c.id = assigner.ids()[j];
    auto row = assigner.centers()[j];
    c.center.assign(row.begin(), row.end());
    c.radius = res.radii[c.id.radius];
    res.candidates.push_back(std::move(c));
  }

  // Step 2.
  std::vector<uint32_t> users(n);
  std::iota(users.begin(), users.end(), 0);
  std::vector<uint64_t> a(n);
  std::vector<int64_t> creation_radius(n);
  std::vector<double> creators(Y, 0.0);
  for (uint32_t i = 0; i < n; ++i) {
    Assigner::Creation cr;
    a[i] = assigner.AssignA(points[i], i, &cr);
    creation_radius[i] = cr.radius;
    if (cr.candidate >= 0) creators[cr.candidate] += 1.0;
  }

  // Step 3.
  FrequencyOracleConfig fa;
  fa.domain_size = Y;
  fa.epsilon = budget_a->epsilon();
  fa.hash_seed = rng.Fork("weights.a.oracle").NextU64();
  fa.max_bins = config.max_bins;
  fa.noise_off = config.simulation.noise_off;
  auto oracle_a = UnaryFrequencyOracle::Create(fa);
  if (!oracle_a.ok()) return oracle_a.status();
  Rng a_rng = rng.Fork("weights.a");
  const FrequencyEstimate a_hat = session.Histogram(
      4, "weights.a", *oracle_a, users, a, config.beta, a_rng);
  res.ledger.Charge("weights.a", *budget_a, "frequency oracle");

  // Step 4.
  res.theta_w = CandidateThresholdW(config.c_W, d, n, config.a, config.epsilon,
                                    config.beta, config.delta);
  std::vector<bool> in_w(Y, false);
  double max_a_hat = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < Y; ++j) {
    res.candidates[j].a_hat = a_hat(j);
    max_a_hat = std::max(max_a_hat, res.candidates[j].a_hat);
    if (res.candidates[j].a_hat >= res.theta_w) {
      in_w[j] = true;
      res.candidates[j].in_w = true;
      res.w.push_back(j);
    }
  }
  if (res.w.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no candidate reached theta_W = ", res.theta_w, " (|Y| = ", Y,
        ", max estimated weight ", max_a_hat, ")"));
  }
  {
    ByteWriter wr;
    wr.U32(static_cast<uint32_t>(res.w.size()));
    for (size_t j : res.w) wr.U32(static_cast<uint32_t>(j));
    session.Broadcast(5, "W", wr.Take());
  }
  VectorList w_centers(d);
  for (size_t j : res.w) w_centers.Append(res.candidates[j].center);
  std::vector<size_t> w_pos(Y, 0);
  for (size_t k = 0; k < res.w.size(); ++k) w_pos[res.w[k]] = k;
  std::vector<uint64_t> b(n);
  std::vector<uint64_t> b_item(n);
  for (uint32_t i = 0; i < n; ++i) {
    b[i] = AssignB(points[i], a[i], in_w, res.w, w_centers);
    b_item[i] = w_pos[b[i]];
  }

  // Step 5.
  FrequencyOracleConfig fb = fa;
  fb.domain_size = res.w.size();
  fb.epsilon = budget_b->epsilon();
  fb.hash_seed = rng.Fork("weights.b.oracle").NextU64();
  auto oracle_b = UnaryFrequencyOracle::Create(fb);
  if (!oracle_b.ok()) return oracle_b.status();
  Rng b_rng = rng.Fork("weights.b");
  const FrequencyEstimate b_hat = session.Histogram(
      5, "weights.b", *oracle_b, users, b_item, config.beta, b_rng);
  res.ledger.Charge("weights.b", *budget_b, "frequency oracle");

  // Step 6.
  std::vector<double> weights(res.w.size());
  double total_weight = 0.0;
  for (size_t k = 0; k < res.w.size(); ++k) {
    res.candidates[res.w[k]].b_hat = b_hat(k);
    weights[k] = std::max(0.0, b_hat(k));
    total_weight += weights[k];
  }
  if (!(total_weight > 0.0)) {
    res.equal_weight_fallback = true;
    std::fill(weights.begin(), weights.end(), 1.0);
  }
  auto weighted =
      WeightedPointSet::Create(d, w_centers.coords(), std::move(weights));
  if (!weighted.ok()) return weighted.status();
  Rng solver_rng = rng.Fork("solver");
  auto solved =
      Solve(*weighted, config.k, config.objective, config.solver, solver_rng);
  if (!solved.ok()) return solved.status();
  res.solve = *std::move(solved);

  if (config.instrument) {
    PipelineTruth truth;
    truth.creation_radius = std::move(creation_radius);
    truth.a.assign(a.begin(), a.end());
    truth.b.assign(b.begin(), b.end());
    truth.a_count.assign(Y, 0.0);
    truth.b_count.assign(Y, 0.0);
    for (size_t i = 0; i < n; ++i) {
      truth.a_count[a[i]] += 1.0;
      truth.b_count[b[i]] += 1.0;
    }
    truth.creators = std::move(creators);
    res.truth = std::move(truth);
  }
  return res;
}

}  // namespace ldpkm
