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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "ldpkm/claims_audit.h"
#include "ldpkm/experiment.h"
#include "ldpkm/gaussian_mechanism.h"
#include "ldpkm/selftest.h"
#include "ldpkm/solver.h"

namespace ldpkm {
namespace {

TEST(RadiusGrid, Halves) {
  EXPECT_EQ(RadiusGrid(1.0, 4), (std::vector<double>{1.0, 0.5, 0.25, 0.125}));
  EXPECT_EQ(LogRadiusCount(1), 1u);
  EXPECT_EQ(LogRadiusCount(1024), 10u);
  EXPECT_EQ(LogRadiusCount(1025), 11u);
}

TEST(CandidateThresholdW, Formula) {
  const double v = CandidateThresholdW(2.0, 4, 1000, 0.2, 0.5, 0.1, 1e-6);
  EXPECT_NEAR(v,
              2.0 * 2.0 / 0.5 * std::pow(1000.0, 0.7) * std::log(10.0) *
                  std::log(4000 / 1e-6),
              1e-9 * v);
}

TEST(AssignB, KeepsMembersAndSendsOthersToNearest) {
  VectorList w_centers(1, {0.0, 1.0});
  std::vector<size_t> w_members = {1, 3};
  std::vector<bool> in_w = {false, true, false, true};
  const std::vector<double> x = {0.9};
  EXPECT_EQ(AssignB(x, 1, in_w, w_members, w_centers), 1u);
  EXPECT_EQ(AssignB(x, 0, in_w, w_members, w_centers), 3u);
  const std::vector<double> mid = {0.5};
  EXPECT_EQ(AssignB(mid, 2, in_w, w_members, w_centers), 1u);  // tie to lowest
}

TEST(PipelineConfig, Validation) {
  PipelineConfig c;
  EXPECT_TRUE(ValidatePipelineConfig(c).ok());
  c.k = 0;
  EXPECT_FALSE(ValidatePipelineConfig(c).ok());
  c = PipelineConfig{};
  c.epsilon = -1;
  EXPECT_FALSE(ValidatePipelineConfig(c).ok());
  c = PipelineConfig{};
  c.delta = 0;
  EXPECT_FALSE(ValidatePipelineConfig(c).ok());
}

// Noise-off runs on separable micro instances reproduce the solver run on
// the raw points.
TEST(WeightedCenters, NoiseOffMatchesSolverOnSeparableData) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const size_t k = 2 + seed % 3;
    auto pts = *SeparableMicroInstance(120 + 20 * seed, 3, k, rng);
    for (Objective p : {Objective::kMeans, Objective::kMedian}) {
      auto config = NoiseOffMicroConfig(k, p);
      Rng run(seed);
      auto res = WeightedCenters(pts, config, run);
      ASSERT_TRUE(res.ok()) << res.status();
      const double pipeline = *Cost(pts, res->solve->centers, p);
      Rng solver(seed);
      auto direct = Solve(WeightedPointSet::Unit(pts), k, p, config.solver, solver);
      ASSERT_TRUE(direct.ok());
      EXPECT_TRUE(CostsMatch(pipeline, direct->cost))
          << pipeline << " vs " << direct->cost;
    }
  }
}

PointSet Mixture(uint64_t n, uint64_t seed) {
  GeneratorSpec g;
  g.components = 3;
  g.sigma = 0.0;
  g.means_radius = 0.7;
  Rng rng(seed);
  return GenerateMixture(n, 4, 1.0, g, rng)->points;
}

PipelineConfig DeskConfig(size_t k, double eps) {
  PipelineConfig c;
  c.k = k;
  c.epsilon = eps;
  c.radius_top = 0.2;
  c.radius_levels = 2;
  c.t = 1000;
  c.repetitions = 1;
  c.c_W = 1e-3;
  c.relaxed_lsh = true;
  c.lsh_q = 0.05;
  c.thresholds.heavy_select = 0.5;
  c.thresholds.sigma_multiplier = kMinSigmaMultiplier;
  c.instrument = true;
  return c;
}

TEST(WeightedCenters, LedgerWithinBudgetAndRoundsBounded) {
  auto pts = Mixture(8192, 2);
  for (double eps : {16.0, 64.0}) {
    auto config = DeskConfig(3, eps);
    ProtocolTranscript t;
    Rng rng(3);
    auto res = WeightedCenters(pts, config, rng, &t);
    if (!res.ok()) {
      EXPECT_EQ(res.status().code(), absl::StatusCode::kFailedPrecondition);
      continue;
    }
    EXPECT_TRUE(res->ledger.FitsWithin(*PrivacyBudget::Create(eps, 1e-6)));
    EXPECT_LE(t.RoundCount(), 7u);
    EXPECT_TRUE(t.OneReportPerUserPerChannel());
  }
}

TEST(WeightedCenters, DeskSharesComposeExactly) {
  auto pts = Mixture(8192, 4);
  auto config = DeskConfig(3, 64.0);
  config.share_sweep = 0.5;
  config.share_weights_a = 0.25;
  config.share_weights_b = 0.25;
  Rng rng(4);
  auto res = WeightedCenters(pts, config, rng);
  ASSERT_TRUE(res.ok()) << res.status();
  EXPECT_EQ(res->ledger.total_epsilon(), Rational(64));
  EXPECT_LE(res->ledger.total_delta(), ExactRational(1e-6));
}

TEST(WeightedCenters, TheoryModeRefusesAtDeskScale) {
  auto pts = Mixture(4096, 5);
  PipelineConfig c;
  c.mode = Mode::kTheory;
  c.k = 3;
  Rng rng(5);
  auto res = WeightedCenters(pts, c, rng);
  EXPECT_EQ(res.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(WeightedCenters, AssignmentRulesHoldOnTruth) {
  auto pts = Mixture(8192, 6);
  auto config = DeskConfig(3, 64.0);
  config.radius_levels = 3;
  Rng rng(6);
  auto res = WeightedCenters(pts, config, rng);
  ASSERT_TRUE(res.ok()) << res.status();
  ASSERT_TRUE(res->truth.has_value());
  const auto& truth = *res->truth;
  const auto& cands = res->candidates;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto x = pts[i];
    const size_t a = truth.a[i];
    const double da = Distance(x, cands[a].center);
    if (truth.creation_radius[i] < 0) {
      // Nearest candidate overall, ties to the lowest id.
      for (size_t j = 0; j < cands.size(); ++j) {
        const double dj = Distance(x, cands[j].center);
        EXPECT_TRUE(dj > da || (dj == da && j >= a));
      }
      continue;
    }
    const auto cr = static_cast<uint32_t>(truth.creation_radius[i]);
    if (cands[a].id.radius == cr) {
      // Kept the created candidate: nothing at a smaller radius is strictly
      // closer.
      for (const auto& c : cands) {
        if (c.id.radius > cr) {
          EXPECT_GE(Distance(x, c.center), da);
        }
      }
    } else {
      EXPECT_GT(cands[a].id.radius, cr);
    }
    // b keeps members of W.
    if (cands[a].in_w) {
      EXPECT_EQ(truth.b[i], a);
    }
    EXPECT_TRUE(cands[truth.b[i]].in_w);
  }
}

TEST(WeightedCenters, CsvFormats) {
  auto pts = Mixture(8192, 7);
  Rng rng(7);
  auto res = WeightedCenters(pts, DeskConfig(3, 64.0), rng);
  ASSERT_TRUE(res.ok()) << res.status();
  const std::string cands = res->CandidatesCsv();
  EXPECT_EQ(cands.substr(0, cands.find('\n')),
            "radius_index,m,u,radius,x0,x1,x2,x3,a_hat,in_w,b_hat");
  const std::string centers = res->CentersCsv();
  EXPECT_EQ(centers.substr(0, centers.find('\n')), "x0,x1,x2,x3");
  size_t rows = 0;
  for (char ch : centers) rows += ch == '\n';
  EXPECT_EQ(rows, 4u);
  for (size_t j = 1; j < res->candidates.size(); ++j) {
    EXPECT_LT(res->candidates[j - 1].id, res->candidates[j].id);
  }
}

TEST(WeightedCenters, DeterministicGivenSeed) {
  auto pts = Mixture(4096, 8);
  auto config = DeskConfig(3, 64.0);
  config.t = 500;
  Rng a(9), b(9);
  auto ra = WeightedCenters(pts, config, a);
  auto rb = WeightedCenters(pts, config, b);
  ASSERT_EQ(ra.ok(), rb.ok());
  if (ra.ok()) {
    EXPECT_EQ(ra->solve->centers.centers(), rb->solve->centers.centers());
  }
}

TEST(ClaimsAudit, NoiseOffClaimsHold) {
  Rng rng(10);
  auto pts = *SeparableMicroInstance(200, 2, 3, rng);
  auto config = NoiseOffMicroConfig(3, Objective::kMeans);
  config.instrument = true;
  Rng run(10);
  auto res = WeightedCenters(pts, config, run);
  ASSERT_TRUE(res.ok());
  Rng audit(11);
  auto claims = AuditClaims(pts, config, *res, audit);
  ASSERT_TRUE(claims.ok()) << claims.status();
  EXPECT_TRUE(claims->weights_ok);
  EXPECT_TRUE(std::isfinite(claims->max_distance_ratio));
  EXPECT_LE(claims->cost_path_gap, 1e-9);
  const std::string csv = claims->ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "claim,quantity,value");
}

}  // namespace
}  // namespace ldpkm
