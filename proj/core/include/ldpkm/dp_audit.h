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

// Privacy audits for the shipped randomizers.

#ifndef LDPKM_DP_AUDIT_H_
#define LDPKM_DP_AUDIT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/frequency_oracle.h"
#include "ldpkm/rng.h"

namespace ldpkm {

struct RatioAudit {
  double epsilon = 0.0;
  size_t inputs = 0;
  uint64_t reports = 0;
  // max over input pairs and reports of P[report | x] / P[report | x'].
  double max_ratio = 0.0;
  bool passed = false;
};

// Exact audit over enumerable input and report spaces. A report with
// positive probability under one input and zero under another gives an
// infinite ratio.
absl::StatusOr<RatioAudit> AuditEnumerable(
    size_t num_inputs, uint64_t num_reports,
    const std::function<double(size_t, uint64_t)>& probability,
    double epsilon);

// Unary randomized response over at most 16 bins; inputs are the domain
// items plus the null item. Refuses larger configurations.
absl::StatusOr<RatioAudit> AuditUnaryOracle(const UnaryFrequencyOracle& oracle);

struct GaussianAudit {
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 0.0;
  double sigma = 0.0;
  double analytic_delta = 0.0;
  double mc_delta = 0.0;
  double mc_low = 0.0;
  double mc_high = 0.0;
  uint64_t samples = 0;
  // Smallest epsilon whose analytic delta is at most the target delta.
  double effective_epsilon = 0.0;
  bool passed = false;
};

// delta(epsilon) of the Gaussian mechanism with the given sensitivity and
// noise, in closed form.
double GaussianMechanismDelta(double sensitivity, double sigma, double epsilon);

// Checks that the mechanism is (epsilon, delta)-private: the closed form and
// an importance-sampled estimate of the hockey-stick divergence between the
// output distributions on two neighboring inputs, each compared with delta.
GaussianAudit AuditGaussian(double sensitivity, double sigma, double epsilon,
                            double delta, uint64_t samples, Rng& rng);

struct DpAuditRow {
  std::string mechanism;
  double epsilon = 0.0;
  // Domain size for the oracle; sigma multiplier for the averaging reports.
  double parameter = 0.0;
  // Max likelihood ratio (exact audits) or upper 95% delta (sampled).
  double statistic = 0.0;
  double bound = 0.0;
  bool passed = false;
};

// Unary oracle at every (epsilon, domain size); Gaussian-sum reports and
// the averaging step's centered vector reports at every epsilon, each with
// the given delta and sample count.
std::vector<DpAuditRow> DpAuditSuite(std::span<const double> epsilons,
                                     std::span<const uint64_t> domains,
                                     double delta, uint64_t samples, Rng& rng);
// "mechanism,epsilon,parameter,statistic,bound,passed".
std::string DpAuditCsv(std::span<const DpAuditRow> rows);

}  // namespace ldpkm

#endif  // LDPKM_DP_AUDIT_H_
