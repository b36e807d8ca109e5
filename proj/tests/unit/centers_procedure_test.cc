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

#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "ldpkm/experiment.h"
#include "ldpkm/lsh.h"
#include "ldpkm/privacy_budget.h"
#include "ldpkm/protocol.h"

namespace ldpkm {
namespace {

std::vector<uint32_t> AllUsers(size_t n) {
  std::vector<uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  return ids;
}

TEST(IntervalGrid, CoversDoubledRange) {
  auto g = IntervalGrid::Make(1.0, 0.3);
  EXPECT_EQ(g.lo, -2.0);
  EXPECT_EQ(g.hi, 2.0);
  EXPECT_EQ(g.count, 14u);  // ceil(4 / 0.3)
  EXPECT_NEAR(g.End(g.count - 1) - g.Start(g.count - 1), 0.1, 1e-12);
  EXPECT_EQ(g.IndexOf(-2.0), 0u);
  EXPECT_EQ(g.IndexOf(2.0), g.count - 1);
  EXPECT_EQ(g.IndexOf(-5.0), 0u);
  EXPECT_EQ(g.IndexOf(5.0), g.count - 1);
  for (double v = -1.99; v < 2.0; v += 0.07) {
    const size_t j = g.IndexOf(v);
    EXPECT_LE(g.Start(j), v);
    EXPECT_GE(g.End(j), v);
  }
}

TEST(IntervalLength, Formula) {
  EXPECT_DOUBLE_EQ(IntervalLength(0.1, 3.0, 4, 1000, 0.1),
                   2 * 0.1 * 3.0 * std::sqrt(std::log(4 * 1000 / 0.1) / 4));
}

TEST(SelectHeavy, ThresholdCapAndTies) {
  BinMap bins(6, 64, 0);
  FrequencyEstimate est(bins, {5, 9, 9, 1, 7, 20}, 50, 1.0, 0.1);
  auto all = SelectHeavy(est, 5.0, 100);
  EXPECT_EQ(all.list, (std::vector<uint64_t>{5, 1, 2, 4, 0}));
  EXPECT_EQ(all.before_trim, 5u);
  auto capped = SelectHeavy(est, 5.0, 2);
  EXPECT_EQ(capped.list, (std::vector<uint64_t>{5, 1}));
  EXPECT_EQ(capped.before_trim, 5u);
}

TEST(LocalizeBoxes, ArgmaxWithLowTieAndOneIntervalMargin) {
  auto g = IntervalGrid::Make(1.0, 1.0);  // four intervals
  // Two values, two axes. Value 0: axis 0 peaks at interval 2; axis 1 ties
  // between intervals 1 and 3.
  auto counts = [](size_t axis, uint64_t code) -> double {
    const uint64_t interval = code / 2, value = code % 2;
    if (value == 1) return interval == 0 ? 3.0 : 0.0;
    if (axis == 0) return interval == 2 ? 4.0 : 1.0;
    return (interval == 1 || interval == 3) ? 2.0 : 0.0;
  };
  auto boxes = LocalizeBoxes(2, 2, g, counts);
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_DOUBLE_EQ(boxes[0].lo[0], -1.0);
  EXPECT_DOUBLE_EQ(boxes[0].hi[0], 2.0);
  EXPECT_DOUBLE_EQ(boxes[0].lo[1], -2.0);
  EXPECT_DOUBLE_EQ(boxes[0].hi[1], 1.0);
  EXPECT_DOUBLE_EQ(boxes[1].lo[0], -3.0);
  EXPECT_DOUBLE_EQ(boxes[1].hi[0], 0.0);
}

struct Cluster {
  PlantedCluster data;
  LshSpec spec;
};

Cluster SmallCluster(uint64_t seed) {
  Rng rng(seed);
  auto data = *PlantCluster(400, 2, 1.0, 300, 0.01, rng);
  auto spec = *BuildRelaxedFamily(2, 400, 0.01, 0.5, 0.05);
  return {std::move(data), spec};
}

ProcedureParams DeskParams(double t) {
  ProcedureParams p;
  p.r = 0.01;
  p.t = t;
  p.budget = *PrivacyBudget::Create(2.0, 1e-6);
  p.instrument = true;
  return p;
}

TEST(CentersProcedure, NoiseOffFindsPlantedCluster) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = SmallCluster(seed);
    ProtocolSession session({.noise_off = true});
    Rng rng(seed);
    auto out = CentersProcedure(session, c.data.points, AllUsers(400), c.spec,
                                DeskParams(300), rng);
    ASSERT_TRUE(out.ok()) << out.status();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pc : out->centers) {
      best = std::min(best, Distance(pc.center, c.data.center));
    }
    EXPECT_LE(best, 5 * c.spec.c * 0.01) << "seed " << seed;
    ASSERT_TRUE(out->audit.has_value());
    EXPECT_TRUE(out->audit->list_inclusion);
    EXPECT_TRUE(out->audit->list_membership);
    EXPECT_TRUE(out->audit->survivor_counts);
  }
}

TEST(CentersProcedure, SpendComposesToBudget) {
  auto c = SmallCluster(1);
  ProtocolSession session({});
  Rng rng(1);
  const auto params = DeskParams(300);
  auto out = CentersProcedure(session, c.data.points, AllUsers(400), c.spec,
                              params, rng);
  ASSERT_TRUE(out.ok());
  std::vector<PrivacyBudget> parts;
  for (const auto& e : out->spend) parts.push_back(e.budget);
  EXPECT_EQ(*Compose(parts), params.budget);
}

TEST(CentersProcedure, UsesFourRoundsFromBase) {
  auto c = SmallCluster(2);
  ProtocolTranscript t;
  ProtocolSession session({}, &t);
  Rng rng(2);
  auto params = DeskParams(300);
  params.round_base = 3;
  ASSERT_TRUE(CentersProcedure(session, c.data.points, AllUsers(400), c.spec,
                               params, rng)
                  .ok());
  EXPECT_LE(t.RoundCount(), 4u);
  for (const auto& rec : t.Records()) {
    EXPECT_GE(rec.round, 3u);
    EXPECT_LE(rec.round, 6u);
  }
  EXPECT_TRUE(t.OneReportPerUserPerChannel());
}

TEST(CentersProcedure, DeterministicGivenSeed) {
  auto c = SmallCluster(3);
  std::vector<std::vector<double>> runs;
  for (int i = 0; i < 2; ++i) {
    ProtocolSession session({});
    Rng rng(3);
    auto out = *CentersProcedure(session, c.data.points, AllUsers(400), c.spec,
                                 DeskParams(300), rng);
    std::vector<double> flat;
    for (const auto& pc : out.centers) {
      flat.insert(flat.end(), pc.center.begin(), pc.center.end());
    }
    runs.push_back(flat);
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(CentersProcedure, RejectsBadInputs) {
  auto c = SmallCluster(4);
  ProtocolSession session({});
  Rng rng(4);
  auto p = DeskParams(0.0);
  EXPECT_EQ(CentersProcedure(session, c.data.points, AllUsers(400), c.spec, p, rng)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  p = DeskParams(300);
  p.budget = *PrivacyBudget::Create(1.0, 0.0);
  EXPECT_FALSE(
      CentersProcedure(session, c.data.points, AllUsers(400), c.spec, p, rng).ok());
  auto other = *BuildRelaxedFamily(3, 400, 0.01, 0.5, 0.05);
  EXPECT_FALSE(CentersProcedure(session, c.data.points, AllUsers(400), other,
                                DeskParams(300), rng)
                   .ok());
}

TEST(CentersProcedure, TheoryModeRefusesSmallThreshold) {
  auto c = SmallCluster(5);
  auto spec = *BuildFamily(2, 400, 0.01, 0.2, 0.1);
  ProtocolSession session({});
  Rng rng(5);
  auto p = DeskParams(300);
  p.mode = Mode::kTheory;
  p.beta = 1e-3;
  auto out = CentersProcedure(session, c.data.points, AllUsers(400), spec, p, rng);
  EXPECT_EQ(out.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(out.status().message().find("minimum feasible t"), std::string::npos);
}

TEST(ProcedureMinT, Formula) {
  const double v = ProcedureMinT(1000, 4, 0.1, 1.0, 0.1, 1e-6, 2.0);
  EXPECT_NEAR(v,
              2.0 * std::pow(1000.0, 0.6) * 2.0 * std::log(4000 / (0.1 * 1e-6)),
              1e-9 * v);
}

}  // namespace
}  // namespace ldpkm
