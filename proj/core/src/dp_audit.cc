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

#include "ldpkm/dp_audit.h"

#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_cat.h"
#include "ldpkm/gaussian_mechanism.h"

namespace ldpkm {
namespace {

constexpr double kRatioSlack = 1e-9;

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

absl::StatusOr<RatioAudit> AuditEnumerable(
    size_t num_inputs, uint64_t num_reports,
    const std::function<double(size_t, uint64_t)>& probability,
    double epsilon) {
  if (num_inputs < 2) return absl::InvalidArgumentError("need two inputs");
  if (num_reports > (uint64_t{1} << 20)) {
    return absl::FailedPreconditionError("report space too large to enumerate");
  }
  RatioAudit a;
  a.epsilon = epsilon;
  a.inputs = num_inputs;
  a.reports = num_reports;
  a.max_ratio = 1.0;
  std::vector<double> p(num_inputs);
  for (uint64_t r = 0; r < num_reports; ++r) {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (size_t x = 0; x < num_inputs; ++x) {
      const double v = probability(x, r);
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    if (hi == 0.0) continue;
    const double ratio =
        lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
    a.max_ratio = std::max(a.max_ratio, ratio);
  }
  a.passed = a.max_ratio <= std::exp(epsilon) * (1.0 + kRatioSlack);
  return a;
}

absl::StatusOr<RatioAudit> AuditUnaryOracle(const UnaryFrequencyOracle& oracle) {
  const uint64_t domain = oracle.config().domain_size;
  if (domain > 16 || oracle.num_bins() > 16) {
    return absl::FailedPreconditionError(
        absl::StrCat("exact audit needs at most 16 items, got ", domain));
  }
  const uint32_t bins = oracle.num_bins();
  const uint64_t reports = uint64_t{1} << bins;
  UnaryReport rep;
  rep.config_tag = oracle.config_tag();
  rep.num_bins = bins;
  rep.words.assign(1, 0);
  return AuditEnumerable(
      domain + 1, reports,
      [&](size_t x, uint64_t r) {
        rep.words[0] = r;
        return oracle.ReportProbability(x == domain ? kNullItem : x, rep);
      },
      oracle.config().epsilon);
}

double GaussianMechanismDelta(double sensitivity, double sigma,
                              double epsilon) {
  const double mu = sensitivity / sigma;
  if (mu == 0.0) return 0.0;
  return Phi(mu / 2.0 - epsilon / mu) -
         std::exp(epsilon) * Phi(-mu / 2.0 - epsilon / mu);
}

GaussianAudit AuditGaussian(double sensitivity, double sigma, double epsilon,
                            double delta, uint64_t samples, Rng& rng) {
  GaussianAudit a;
  a.epsilon = epsilon;
  a.delta = delta;
  a.sensitivity = sensitivity;
  a.sigma = sigma;
  a.samples = samples;
  a.analytic_delta = GaussianMechanismDelta(sensitivity, sigma, epsilon);

  // Output on x is N(0, 1) and on x' is N(mu, 1) along the difference
  // direction (other directions cancel). The privacy loss at z is
  // mu^2 / 2 - mu z, and 1 - e^{eps - loss} is positive for z < z*. Sample
  // around z* and reweight.
  const double mu = sensitivity / sigma;
  const double z_star = (mu * mu / 2.0 - epsilon) / mu;
  double sum = 0.0, sum_sq = 0.0;
  for (uint64_t s = 0; s < samples; ++s) {
    const double z = z_star + rng.Normal();
    const double loss = mu * mu / 2.0 - mu * z;
    const double f = std::max(0.0, 1.0 - std::exp(epsilon - loss));
    const double w = std::exp(-z * z_star + z_star * z_star / 2.0);
    const double v = f * w;
    sum += v;
    sum_sq += v * v;
  }
  const double m = sum / samples;
  const double var = std::max(0.0, sum_sq / samples - m * m);
  const double half = 1.96 * std::sqrt(var / samples);
  a.mc_delta = m;
  a.mc_low = m - half;
  a.mc_high = m + half;

  double lo = 0.0, hi = 1.0;
  while (GaussianMechanismDelta(sensitivity, sigma, hi) > delta && hi < 1e6) {
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (GaussianMechanismDelta(sensitivity, sigma, mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  a.effective_epsilon = hi;
  a.passed = a.analytic_delta <= delta && a.mc_low <= delta &&
             a.effective_epsilon <= epsilon;
  return a;
}

std::vector<DpAuditRow> DpAuditSuite(std::span<const double> epsilons,
                                     std::span<const uint64_t> domains,
                                     double delta, uint64_t samples, Rng& rng) {
  std::vector<DpAuditRow> rows;
  for (double eps : epsilons) {
    for (uint64_t domain : domains) {
      FrequencyOracleConfig config;
      config.domain_size = domain;
      config.epsilon = eps;
      DpAuditRow row{"frequency_oracle", eps, static_cast<double>(domain), 0.0,
                     std::exp(eps), false};
      auto oracle = UnaryFrequencyOracle::Create(config);
      if (oracle.ok()) {
        auto audit = AuditUnaryOracle(*oracle);
        if (audit.ok()) {
          row.statistic = audit->max_ratio;
          row.passed = audit->passed;
        }
      }
      rows.push_back(row);
    }
    // A user's vector lies in B(0, 1): neighbors differ by at most 2.
    Rng sum_rng = rng.Fork(absl::StrCat("sum.", eps));
    const GaussianAudit sum =
        AuditGaussian(2.0, GaussianSumSigma(1.0, eps, delta), eps, delta,
                      samples, sum_rng);
    rows.push_back({"gaussian_sum", eps, 1.0, sum.mc_high, delta, sum.passed});
    // Centered and clipped to radius diam / 2: sensitivity diam. The vector
    // reports get half of the averaging step's budget.
    for (double mult : {kMinSigmaMultiplier, 8.0}) {
      Rng avg_rng = rng.Fork(absl::StrCat("avg.", eps, ".", mult));
      const GaussianAudit avg = AuditGaussian(
          1.0, LdpAvgSigma(1.0, 2.0 * eps, delta, mult), eps, delta, samples,
          avg_rng);
      rows.push_back({"ldp_avg_vector", eps, mult, avg.mc_high, delta, avg.passed});
    }
  }
  return rows;
}

std::string DpAuditCsv(std::span<const DpAuditRow> rows) {
  std::string out = "mechanism,epsilon,parameter,statistic,bound,passed\n";
  for (const auto& r : rows) {
    absl::StrAppend(&out, r.mechanism, ",", r.epsilon, ",", r.parameter, ",",
                    r.statistic, ",", r.bound, ",", r.passed ? 1 : 0, "\n");
  }
  return out;
}

}  // namespace ldpkm
