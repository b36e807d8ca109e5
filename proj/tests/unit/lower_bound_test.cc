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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace ldpkm {
namespace {

ClusteringProtocol Fixed(std::vector<double> centers) {
  return [centers](const PointSet&, Rng&) -> absl::StatusOr<VectorList> {
    return VectorList(1, centers);
  };
}

ClusteringProtocol Refusing() {
  return [](const PointSet&, Rng&) -> absl::StatusOr<VectorList> {
    return absl::FailedPreconditionError("no candidates");
  };
}

// Perfect clustering: centers at 0 and at the ones' location.
ClusteringProtocol Exact() {
  return [](const PointSet& pts, Rng&) -> absl::StatusOr<VectorList> {
    double hi = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) hi = std::max(hi, pts[i][0]);
    return VectorList(1, {0.0, hi});
  };
}

TEST(GapTr, Values) {
  std::vector<uint8_t> zero(10, 0), some(10, 0), many(10, 1);
  some[3] = 1;
  EXPECT_EQ(GapTr(zero, 4), GapTrValue::kZero);
  EXPECT_EQ(GapTr(some, 4), GapTrValue::kUndefined);
  EXPECT_EQ(GapTr(many, 4), GapTrValue::kOne);
  EXPECT_EQ(GapTr(some, 1), GapTrValue::kOne);
}

TEST(ProtocolB, DecisionUsesClosedInterval) {
  std::vector<uint8_t> bits(20, 0);
  for (uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    auto probe = *ProtocolB(bits, Fixed({5.0, 5.0}), 0.4, Objective::kMeans, rng);
    // Endpoints count as inside.
    Rng again(s);
    auto at_lo = *ProtocolB(bits, Fixed({probe.lo, 5.0}), 0.4, Objective::kMeans, again);
    EXPECT_EQ(at_lo.output, 1);
    Rng again2(s);
    auto at_hi = *ProtocolB(bits, Fixed({5.0, probe.hi}), 0.4, Objective::kMeans, again2);
    EXPECT_EQ(at_hi.output, 1);
    EXPECT_EQ(probe.output, 0);
    EXPECT_NEAR(probe.hi - probe.lo, 0.1, 1e-12);
    EXPECT_DOUBLE_EQ(probe.mu, 0.5 * (probe.lo + probe.hi));
  }
}

TEST(ProtocolB, ExactClusteringDecidesOnes) {
  std::vector<uint8_t> bits(100, 0);
  for (int i = 0; i < 30; ++i) bits[i] = 1;
  for (uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    auto r = *ProtocolB(bits, Exact(), 0.4, Objective::kMeans, rng);
    EXPECT_EQ(r.output, 1);
    EXPECT_EQ(r.cost, 0.0);
  }
}

TEST(ProtocolB, RefusalFallsBackToOrigin) {
  std::vector<uint8_t> bits(10, 0);
  bits[0] = 1;
  Rng rng(1);
  auto r = ProtocolB(bits, Refusing(), 0.4, Objective::kMedian, rng);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->inner_refused);
  EXPECT_EQ(r->centers, VectorList(1, {0.0, 0.0}));
  EXPECT_DOUBLE_EQ(r->cost, r->mu);
  EXPECT_EQ(r->output, r->interval == 0 ? 1 : 0);
}

TEST(ProtocolB, ErringCostMeetsFloor) {
  // If no center lies in the interval, every one sits at distance >= r/2
  // from mu.
  const double r = 0.1;
  std::vector<uint8_t> bits(40, 0);
  for (int i = 0; i < 16; ++i) bits[i] = 1;
  Rng gen(2);
  for (int t = 0; t < 200; ++t) {
    Rng rng(t);
    auto out = *ProtocolB(bits, Fixed({gen.Uniform(), gen.Uniform()}), 0.4,
                          Objective::kMeans, rng);
    if (out.output == 0) {
      EXPECT_GE(out.cost, std::pow(r / 2, 2) * 16 * (1 - 1e-12));
    }
  }
}

TEST(ProtocolB, ObliviousFalsePositiveRate) {
  std::vector<uint8_t> bits(64, 0);
  Rng rng(3);
  const int trials = 4000;
  int ones = 0;
  for (int t = 0; t < trials; ++t) {
    Rng trial = rng.Fork(t);
    ones += ProtocolB(bits, ObliviousProtocol(), 0.4, Objective::kMeans, trial)->output;
  }
  EXPECT_LE(static_cast<double>(ones) / trials, 0.2 + 0.03);
}

TEST(ProtocolB, RejectsBadInputs) {
  Rng rng(4);
  std::vector<uint8_t> none;
  EXPECT_FALSE(ProtocolB(none, Exact(), 0.4, Objective::kMeans, rng).ok());
  std::vector<uint8_t> bits(4, 0);
  EXPECT_FALSE(ProtocolB(bits, Exact(), 0.0, Objective::kMeans, rng).ok());
}

TEST(FloorExperiment, RowsAndCsv) {
  FloorOptions opts;
  opts.n_grid = {64, 256};
  opts.trials = 20;
  Rng rng(5);
  auto rows = FloorExperiment(opts, Exact(), rng);
  ASSERT_TRUE(rows.ok());
  EXPECT_EQ(rows->size(), 2u * 4u * 2u);
  for (const auto& row : *rows) {
    EXPECT_EQ(row.trials, 20u);
    if (row.instance == "tau") {
      EXPECT_EQ(row.errors, 0u);
      EXPECT_EQ(row.tau, std::ceil(row.tau));
    }
    EXPECT_EQ(row.cost_bound_violations, 0u);
  }
  const std::string csv = FloorCsv(*rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "n,tau,instance,decision_error_rate,mean_cost,ci95_low,ci95_high");
}

}  // namespace
}  // namespace ldpkm
