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

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "ldpkm/experiment.h"
#include "ldpkm/lsh.h"
#include "ldpkm/protocol.h"

namespace ldpkm {
namespace {

TEST(GoodCentersFormulas, RepetitionsCapAndThreshold) {
  EXPECT_EQ(RepetitionCount(1024, 0.2, 0.1),
            static_cast<size_t>(std::ceil(4 * std::pow(1024.0, 0.2) * std::log(10.0))));
  EXPECT_DOUBLE_EQ(CandidateCap(1024, 0.2, 0.1, 0.1, 100.0),
                   512 * std::pow(1024.0, 1.3) * std::log(10.0) / 100.0);
  const double t = GoodCentersMinT(1024, 4, 0.2, 0.1, 1.0, 0.1, 1e-6, 1.0);
  EXPECT_NEAR(t,
              std::pow(1024.0, 0.8) * 2.0 * std::log(10.0) *
                  std::log(4096 / (0.1 * 1e-6)),
              1e-9 * t);
}

struct Setup {
  PlantedCluster data;
  LshSpec spec;
  GoodCentersParams params;
};

Setup Make(uint64_t n, size_t reps, uint64_t seed) {
  Rng rng(seed);
  Setup s{*PlantCluster(n, 2, 1.0, n / 2, 0.01, rng),
          *BuildRelaxedFamily(2, n, 0.01, 0.5, 0.05),
          {}};
  s.spec.a = 0.2;
  s.spec.b = 0.1;
  s.params.r = 0.01;
  s.params.t = n / 2.0;
  s.params.repetitions = reps;
  s.params.budget = *PrivacyBudget::Create(4.0, 1e-6);
  s.params.instrument = true;
  return s;
}

TEST(GoodCenters, PartitionIsExactAndBalanced) {
  auto s = Make(1003, 4, 1);
  ProtocolSession session({});
  Rng rng(1);
  auto out = GoodCenters(session, s.data.points, s.spec, s.params, rng);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->M, 4u);
  std::set<uint32_t> seen;
  for (size_t m = 0; m < out->M; ++m) {
    EXPECT_GE(out->parts[m].size(), 1003u / 4);
    EXPECT_LE(out->parts[m].size(), 1003u / 4 + 1);
    EXPECT_TRUE(std::is_sorted(out->parts[m].begin(), out->parts[m].end()));
    for (uint32_t i : out->parts[m]) {
      EXPECT_TRUE(seen.insert(i).second);
      EXPECT_EQ(out->rep_of_user[i], m);
    }
  }
  EXPECT_EQ(seen.size(), 1003u);
}

TEST(GoodCenters, ChargedOnceAcrossRepetitions) {
  auto s = Make(800, 3, 2);
  ProtocolSession session({});
  Rng rng(2);
  auto out = *GoodCenters(session, s.data.points, s.spec, s.params, rng);
  std::vector<PrivacyBudget> parts;
  for (const auto& e : out.spend) parts.push_back(e.budget);
  EXPECT_EQ(*Compose(parts), s.params.budget);
  EXPECT_DOUBLE_EQ(out.t_hat, 400.0 / 6.0);
  EXPECT_DOUBLE_EQ(out.beta_hat, 0.1 / 21.0);
}

TEST(GoodCenters, EachUserReportsOncePerChannel) {
  auto s = Make(600, 3, 3);
  ProtocolTranscript t;
  ProtocolSession session({.per_user_reports = true}, &t);
  Rng rng(3);
  ASSERT_TRUE(GoodCenters(session, s.data.points, s.spec, s.params, rng).ok());
  EXPECT_TRUE(t.OneReportPerUserPerChannel());
  EXPECT_LE(t.RoundCount(), 4u);
  // A user's messages all carry its own repetition's channel prefix.
  for (const auto& rec : t.Records()) {
    if (rec.user >= 600) continue;
    for (const auto& msg : rec.messages) {
      EXPECT_EQ(msg.channel.rfind("gc.m", 0), 0u) << msg.channel;
    }
  }
}

TEST(GoodCenters, CandidateCapIsEnforced) {
  auto s = Make(800, 2, 4);
  s.params.t = 1e9;  // a cap below one candidate
  s.params.thresholds.heavy_select = 1e-12;
  s.params.thresholds.validate = 1e-12;
  ProtocolSession session({.noise_off = true});
  Rng rng(4);
  auto out = GoodCenters(session, s.data.points, s.spec, s.params, rng);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_LE(out->candidate_count(), out->candidate_cap);
}

TEST(GoodCenters, RejectsTooManyRepetitions) {
  auto s = Make(10, 11, 5);
  ProtocolSession session({});
  Rng rng(5);
  EXPECT_EQ(GoodCenters(session, s.data.points, s.spec, s.params, rng).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(GoodCenters, TheoryModeRefusesWithMinimum) {
  auto s = Make(800, 0, 6);
  s.params.mode = Mode::kTheory;
  ProtocolSession session({});
  Rng rng(6);
  auto out = GoodCenters(session, s.data.points, s.spec, s.params, rng);
  EXPECT_EQ(out.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(out.status().message().find("minimum feasible t"), std::string::npos);
}

TEST(GoodCenters, CsvListsEveryHeavyValue) {
  auto s = Make(800, 2, 7);
  ProtocolSession session({.noise_off = true});
  Rng rng(7);
  auto out = *GoodCenters(session, s.data.points, s.spec, s.params, rng);
  const std::string csv = out.ToCsv(2);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,u,x0,x1,surviving");
  size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  size_t listed = 0;
  for (const auto& rep : out.reps) listed += rep.heavy_list.size();
  EXPECT_EQ(rows, listed + 1);
}

}  // namespace
}  // namespace ldpkm
