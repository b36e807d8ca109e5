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

// One pass of candidate-center generation for a fixed radius.
//
// Four interaction rounds, each at a quarter of the budget:
//   heavy     users report their hash value; heavy values form the list L
//   localize  users in d random parts report (interval, value) pairs along
//             one axis of a random basis; the server fixes a box per value
//   average   private averages of each value's points inside its box
//   validate  users report whether they lie near their value's center;
//             values with too few such users are dropped

#ifndef LDPKM_CENTERS_PROCEDURE_H_
#define LDPKM_CENTERS_PROCEDURE_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/frequency_oracle.h"
#include "ldpkm/geometry.h"
#include "ldpkm/lsh.h"
#include "ldpkm/privacy_budget.h"
#include "ldpkm/protocol.h"
#include "ldpkm/rng.h"

namespace ldpkm {

enum class Mode { kTheory, kDesk };

// Multipliers on the procedure's thresholds. Defaults are the theory values.
struct ProcedureThresholds {
  // L = {u : f(u) >= heavy_select * t * n^-b}.
  double heavy_select = 3.0 / 64.0;
  // |L| <= list_cap * |S| * n^b / t.
  double list_cap = 32.0;
  // Drop u when v(u) <= validate * t * n^-b.
  double validate = 0.25;
  // Validation ball radius in units of c * r.
  double capture = 5.0;
  // Multiplies the interval length p.
  double interval_scale = 1.0;
  double sigma_multiplier = 8.0;
  double reliability = 1.0;

  friend bool operator==(const ProcedureThresholds&, const ProcedureThresholds&) = default;
};

// Partition of [-2 Lambda, 2 Lambda] into intervals of one length; the last
// interval may be shorter.
struct IntervalGrid {
  double lo = 0.0;
  double hi = 0.0;
  double length = 1.0;
  size_t count = 1;

  static IntervalGrid Make(double lambda, double length);
  size_t IndexOf(double v) const;
  double Start(size_t j) const { return lo + j * length; }
  double End(size_t j) const { return std::min(lo + (j + 1) * length, hi); }
};

// p = 2 r c sqrt(ln(d n / beta) / d).
double IntervalLength(double r, double c, size_t d, uint64_t n, double beta);

struct ProcedureParams {
  double r = 1.0;
  double t = 1.0;
  double beta = 0.1;
  PrivacyBudget budget = *PrivacyBudget::Create(1.0, 1e-6);
  Mode mode = Mode::kDesk;
  ProcedureThresholds thresholds;
  // Theory-mode minimum: t >= c_t * n^{0.5+b} sqrt(d) / eps * ln(dn/(beta delta)).
  double c_t = 1.0;
  // Extra cap on |L| (0 = none).
  size_t max_list = 0;
  uint32_t round_base = 0;
  std::string channel = "cp";
  uint32_t max_bins = kDefaultMaxBins;
  bool instrument = false;
};

// The value of a point: the oracle bin of its compressed hash.
struct Bucketizer {
  HashFunction hash;
  BinMap bins;
  uint64_t operator()(std::span<const double> x) const { return bins(hash(x)); }
};

struct ProcedureCenter {
  uint64_t u = 0;
  std::vector<double> center;
  // Box in basis coordinates.
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  double box_diameter = 0.0;
  double count_estimate = 0.0;     // step-7 region count
  double validate_estimate = 0.0;  // step-8 v(u)
};

struct ProcedureAuditRow {
  std::string step;
  std::string quantity;
  double truth = 0.0;
  double estimate = 0.0;
};

struct ProcedureAudit {
  std::vector<ProcedureAuditRow> rows;
  size_t heavy_before_trim = 0;
  // Step-2 list properties against exact counts.
  bool list_inclusion = true;
  bool list_membership = true;
  // Every survivor's true v(u) >= t/8 * n^-b.
  bool survivor_counts = true;
  // No survivor's value holds two points at distance >= c r.
  bool e1_on_survivors = true;
  double max_box_diameter = 0.0;
};

struct ProcedureOutput {
  Bucketizer bucketizer;
  OrthonormalBasis basis;
  IntervalGrid grid;
  // L after step 2 (before deletions), in estimate order.
  std::vector<uint64_t> heavy_list;
  // Survivors, ascending by u.
  std::vector<ProcedureCenter> centers;
  std::vector<LedgerEntry> spend;
  std::optional<ProcedureAudit> audit;

  const ProcedureCenter* Find(uint64_t u) const;
};

// c_t * n^{0.5+b} * sqrt(d) / eps * ln(d n / (beta delta)).
double ProcedureMinT(uint64_t n, size_t d, double b, double epsilon,
                     double beta, double delta, double c_t);

// Runs on the users `users` (ascending indices into points).
absl::StatusOr<ProcedureOutput> CentersProcedure(
    ProtocolSession& session, const PointSet& points,
    std::span<const uint32_t> users, const LshSpec& spec,
    const ProcedureParams& params, Rng& rng);

// Step 2 alone: values whose estimate passes the selection threshold,
// trimmed to the cap by descending estimate, ties by value.
struct HeavyValues {
  std::vector<uint64_t> list;
  std::vector<double> estimates;
  size_t before_trim = 0;
};
HeavyValues SelectHeavy(const FrequencyEstimate& estimate, double threshold,
                        size_t cap);

// Step 5 alone: per value, the argmax interval along each axis (ties to the
// lowest index) extended by one interval length each side. counts(axis, code)
// returns the estimate for item code = interval * |L| + position.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};
std::vector<Box> LocalizeBoxes(
    size_t d, size_t list_size, const IntervalGrid& grid,
    const std::function<double(size_t, uint64_t)>& counts);

}  // namespace ldpkm

#endif  // LDPKM_CENTERS_PROCEDURE_H_
