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

// M-fold repetition of the centers procedure on a random partition of the
// users. Each user takes part in exactly one repetition, so the whole run
// costs one procedure's budget.

#ifndef LDPKM_GOOD_CENTERS_H_
#define LDPKM_GOOD_CENTERS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/centers_procedure.h"

namespace ldpkm {

// ceil(4 n^a ln(1/beta)).
size_t RepetitionCount(uint64_t n, double a, double beta);

// 512 n^{1+a+b} ln(1/beta) / t.
double CandidateCap(uint64_t n, double a, double b, double beta, double t);

// c_t * n^{0.5+a+b} sqrt(d) / eps * ln(1/beta) * ln(dn / (beta delta)).
double GoodCentersMinT(uint64_t n, size_t d, double a, double b,
                       double epsilon, double beta, double delta, double c_t);

struct GoodCentersParams {
  double r = 1.0;
  double t = 1.0;
  double beta = 0.1;
  PrivacyBudget budget = *PrivacyBudget::Create(1.0, 1e-6);
  Mode mode = Mode::kDesk;
  ProcedureThresholds thresholds;
  double c_t = 1.0;
  // Forces M (0 = the formula).
  size_t repetitions = 0;
  size_t max_list = 0;
  uint32_t round_base = 0;
  std::string channel = "gc";
  uint32_t max_bins = kDefaultMaxBins;
  bool instrument = false;
};

struct GoodCentersOutput {
  size_t M = 0;
  double t_hat = 0.0;
  double beta_hat = 0.0;
  // parts[m] = ascending user indices of I_m.
  std::vector<std::vector<uint32_t>> parts;
  // rep_of_user[i] = m with i in I_m.
  std::vector<uint32_t> rep_of_user;
  std::vector<ProcedureOutput> reps;
  // Charged once: the repetitions run on disjoint users.
  std::vector<LedgerEntry> spend;
  double candidate_cap = 0.0;
  // Survivors dropped to honor the cap (0 unless the cap binds).
  size_t trimmed = 0;

  size_t candidate_count() const;
  // Header "m,u,x0..x{d-1},surviving"; one row per value in some L_m,
  // coordinates left empty for values without a surviving center.
  std::string ToCsv(size_t dim) const;
};

absl::StatusOr<GoodCentersOutput> GoodCenters(ProtocolSession& session,
                                              const PointSet& points,
                                              const LshSpec& spec,
                                              const GoodCentersParams& params,
                                              Rng& rng);

}  // namespace ldpkm

#endif  // LDPKM_GOOD_CENTERS_H_
