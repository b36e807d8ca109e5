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

#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "ldpkm/bytes.h"
#include "ldpkm/dp_audit.h"
#include "ldpkm/frequency_oracle.h"
#include "ldpkm/gaussian_mechanism.h"
#include "ldpkm/privacy_budget.h"
#include "ldpkm/protocol.h"
#include "ldpkm/transcript.h"

namespace ldpkm {
namespace {

UnaryFrequencyOracle Oracle(uint64_t domain, double eps, bool noise_off = false,
                            uint32_t max_bins = kDefaultMaxBins) {
  FrequencyOracleConfig c;
  c.domain_size = domain;
  c.epsilon = eps;
  c.noise_off = noise_off;
  c.max_bins = max_bins;
  c.hash_seed = 17;
  return *UnaryFrequencyOracle::Create(c);
}

std::vector<uint32_t> Ids(size_t n) {
  std::vector<uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  return ids;
}

// ---- budgets ----

TEST(PrivacyBudget, RejectsInvalid) {
  EXPECT_FALSE(PrivacyBudget::Create(0.0, 0.0).ok());
  EXPECT_FALSE(PrivacyBudget::Create(-1.0, 0.0).ok());
  EXPECT_FALSE(PrivacyBudget::Create(1.0, -1e-9).ok());
  EXPECT_FALSE(PrivacyBudget::Create(1.0, 1.0).ok());
  EXPECT_TRUE(PrivacyBudget::Create(1.0, 0.0).ok());
}

TEST(PrivacyBudget, SingletonComposition) {
  auto b = *PrivacyBudget::Create(1.0, 0.0);
  std::vector<PrivacyBudget> one = {b};
  EXPECT_EQ(*Compose(one), b);
}

TEST(PrivacyBudget, FourfoldCompositionIsExact) {
  auto b = *PrivacyBudget::Create(0.5, 1e-7);
  std::vector<PrivacyBudget> four(4, b);
  auto total = *Compose(four);
  EXPECT_EQ(total.exact_epsilon(), Rational(2));
  EXPECT_EQ(total.exact_delta(), ExactRational(1e-7) * 4);
}

TEST(PrivacyBudget, CompositionAssociativeAndOrderFree) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PrivacyBudget> v;
    for (int i = 0; i < 5; ++i) {
      v.push_back(*PrivacyBudget::Create(rng.Uniform(0.01, 3.0),
                                         rng.Uniform(0.0, 1e-4)));
    }
    const auto all = *Compose(v);
    std::vector<PrivacyBudget> head(v.begin(), v.begin() + 2);
    std::vector<PrivacyBudget> nested = {*Compose(head)};
    nested.insert(nested.end(), v.begin() + 2, v.end());
    EXPECT_EQ(*Compose(nested), all);
    rng.Shuffle(v);
    EXPECT_EQ(*Compose(v), all);
  }
}

TEST(PrivacyBudget, ScaledSplitsSumBack) {
  auto b = *PrivacyBudget::Create(0.3, 1e-6);
  std::vector<PrivacyBudget> parts = {b.Scaled(1, 4), b.Scaled(1, 4),
                                      b.Scaled(1, 8), b.Scaled(3, 8)};
  EXPECT_EQ(*Compose(parts), b);
}

TEST(BudgetLedger, TotalsAndCsv) {
  BudgetLedger ledger;
  EXPECT_EQ(ledger.total_epsilon(), Rational(0));
  ledger.Charge("a", *PrivacyBudget::Create(0.25, 1e-7), "first");
  ledger.Charge("b", *PrivacyBudget::Create(0.75, 0.0));
  EXPECT_EQ(ledger.total_epsilon(), Rational(1));
  EXPECT_TRUE(ledger.FitsWithin(*PrivacyBudget::Create(1.0, 1e-7)));
  EXPECT_FALSE(ledger.FitsWithin(*PrivacyBudget::Create(0.999, 1e-7)));
  const std::string csv = ledger.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,epsilon,delta,note");
  EXPECT_NE(csv.find("a,"), std::string::npos);
}

// ---- frequency oracle ----

TEST(FrequencyOracle, FlipProbabilityFormula) {
  for (double eps : {0.1, 1.0, 4.0}) {
    EXPECT_DOUBLE_EQ(Oracle(4, eps).flip_probability(),
                     1.0 / (1.0 + std::exp(eps / 2.0)));
  }
  EXPECT_FALSE(UnaryFrequencyOracle::Create({.domain_size = 2, .epsilon = 0.0}).ok());
}

TEST(FrequencyOracle, NoiseOffIsOneHot) {
  auto o = Oracle(2, 1.0, true);
  Rng rng(1);
  auto rep = o.Encode(1, rng);
  EXPECT_FALSE(rep.bit(0));
  EXPECT_TRUE(rep.bit(1));
  auto null_rep = o.Encode(kNullItem, rng);
  EXPECT_FALSE(null_rep.bit(0));
  EXPECT_FALSE(null_rep.bit(1));
}

TEST(FrequencyOracle, ReportProbabilitiesSumToOne) {
  auto o = Oracle(3, 1.0);
  Rng rng(2);
  for (uint64_t item : {uint64_t{0}, uint64_t{2}, kNullItem}) {
    double total = 0.0;
    for (uint64_t mask = 0; mask < 8; ++mask) {
      UnaryReport r{o.config_tag(), 3, {mask}};
      total += o.ReportProbability(item, r);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(FrequencyOracle, ExactAuditBoundsRatio) {
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    for (uint64_t domain : {2, 4, 16}) {
      auto audit = AuditUnaryOracle(Oracle(domain, eps));
      ASSERT_TRUE(audit.ok());
      EXPECT_TRUE(audit->passed);
      EXPECT_LE(audit->max_ratio, std::exp(eps) * (1 + 1e-12));
    }
  }
  auto two = AuditUnaryOracle(Oracle(2, 1.0));
  EXPECT_LE(two->max_ratio, std::exp(1.0) * (1 + 1e-12));
}

TEST(FrequencyOracle, NoiseOffFailsAudit) {
  auto audit = AuditUnaryOracle(Oracle(2, 1.0, true));
  ASSERT_TRUE(audit.ok());
  EXPECT_FALSE(audit->passed);
  EXPECT_TRUE(std::isinf(audit->max_ratio));
}

TEST(FrequencyOracle, AuditRefusesLargeDomains) {
  EXPECT_FALSE(AuditUnaryOracle(Oracle(64, 1.0)).ok());
}

TEST(DpAudit, InputIndependentRandomizerHasRatioOne) {
  auto audit = AuditEnumerable(
      3, 4, [](size_t, uint64_t r) { return 0.25 + 0.0 * r; }, 0.1);
  ASSERT_TRUE(audit.ok());
  EXPECT_DOUBLE_EQ(audit->max_ratio, 1.0);
  EXPECT_TRUE(audit->passed);
}

TEST(DpAudit, GaussianClosedFormMatchesCalibration) {
  const double sigma = GaussianSumSigma(1.0, 1.0, 1e-6);
  EXPECT_LE(GaussianMechanismDelta(2.0, sigma, 1.0), 1e-6);
  Rng rng(3);
  auto audit = AuditGaussian(2.0, sigma, 1.0, 1e-6, 100000, rng);
  EXPECT_TRUE(audit.passed);
  auto weak = AuditGaussian(2.0, sigma / 10.0, 1.0, 1e-6, 100000, rng);
  EXPECT_FALSE(weak.passed);
}

TEST(FrequencyOracle, ZeroReportsGiveZero) {
  auto o = Oracle(4, 1.0);
  auto est = o.Aggregate({}, 0.1);
  ASSERT_TRUE(est.ok());
  for (double v : est->bin_estimates()) EXPECT_EQ(v, 0.0);
}

TEST(FrequencyOracle, NoiseOffIsExact) {
  auto o = Oracle(5, 1.0, true);
  ProtocolSession session({.noise_off = true});
  std::vector<uint64_t> items = {0, 1, 1, 4, kNullItem, 4, 4};
  Rng rng(4);
  auto est = session.Histogram(0, "h", o, Ids(items.size()), items, 0.1, rng);
  EXPECT_EQ(est(0), 1.0);
  EXPECT_EQ(est(1), 2.0);
  EXPECT_EQ(est(2), 0.0);
  EXPECT_EQ(est(4), 3.0);
}

TEST(FrequencyOracle, ErrorBoundFormula) {
  EXPECT_DOUBLE_EQ(FrequencyErrorBound(2.0, 400, 0.1),
                   1.5 * std::sqrt(400 * std::log(40.0)));
}

TEST(FrequencyOracle, UnbiasedOnFixedInput) {
  auto o = Oracle(4, 1.0);
  std::vector<uint64_t> items(100);
  for (size_t i = 0; i < items.size(); ++i) items[i] = i % 3;  // bin 3 empty
  const auto counts = o.BinCounts(items);
  Rng rng(5);
  const int trials = 10000;
  std::vector<double> sum(4, 0.0), sq(4, 0.0);
  for (int t = 0; t < trials; ++t) {
    auto ones = o.SampleOnes(counts, items.size(), rng);
    auto est = o.EstimateFromOnes(ones, items.size(), 0.1);
    for (uint32_t b = 0; b < 4; ++b) {
      sum[b] += est.bin_estimate(b);
      sq[b] += est.bin_estimate(b) * est.bin_estimate(b);
    }
  }
  for (uint32_t b = 0; b < 4; ++b) {
    const double mean = sum[b] / trials;
    const double sd = std::sqrt(sq[b] / trials - mean * mean);
    EXPECT_NEAR(mean, static_cast<double>(counts[b]), 4.0 * sd / std::sqrt(trials))
        << "bin " << b;
  }
}

TEST(FrequencyOracle, AggregateSamplingMatchesPerUserEncoding) {
  auto o = Oracle(3, 1.0);
  std::vector<uint64_t> items(60, 1);
  const auto counts = o.BinCounts(items);
  Rng rng(6);
  const int trials = 2000;
  double agg = 0.0, per_user = 0.0;
  for (int t = 0; t < trials; ++t) {
    agg += o.SampleOnes(counts, items.size(), rng)[1];
    std::vector<UnaryReport> reps;
    for (uint64_t x : items) reps.push_back(o.Encode(x, rng));
    per_user += (*o.CountOnes(reps))[1];
  }
  const double q = o.flip_probability();
  const double sd = std::sqrt(60 * q * (1 - q) / trials);
  EXPECT_NEAR(agg / trials, 60 * (1 - q), 5 * sd);
  EXPECT_NEAR(per_user / trials, 60 * (1 - q), 5 * sd);
}

TEST(FrequencyOracle, MixedConfigurationsRefused) {
  auto a = Oracle(4, 1.0), b = Oracle(4, 2.0);
  Rng rng(7);
  std::vector<UnaryReport> reps = {a.Encode(0, rng), b.Encode(0, rng)};
  EXPECT_FALSE(a.CountOnes(reps).ok());
}

TEST(FrequencyOracle, ReportSerializationRoundTrip) {
  auto o = Oracle(130, 1.0);
  Rng rng(8);
  auto rep = o.Encode(77, rng);
  auto back = UnaryReport::Parse(rep.Serialize());
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->words, rep.words);
  EXPECT_EQ(back->config_tag, rep.config_tag);
  auto bytes = rep.Serialize();
  bytes.pop_back();
  EXPECT_FALSE(UnaryReport::Parse(bytes).ok());
}

TEST(BinMap, IdentityWhenDomainFits) {
  BinMap m(100, 128, 3);
  EXPECT_FALSE(m.hashed());
  EXPECT_EQ(m.num_bins(), 100u);
  for (uint64_t x = 0; x < 100; ++x) EXPECT_EQ(m(x), x);
}

TEST(BinMap, HashedRangeAndCollisions) {
  BinMap m(uint64_t{1} << 40, 256, 5);
  EXPECT_TRUE(m.hashed());
  EXPECT_EQ(m.num_bins(), 256u);
  Rng rng(9);
  uint64_t same = 0;
  const int pairs = 20000;
  for (int i = 0; i < pairs; ++i) {
    const uint64_t x = rng.UniformInt(uint64_t{1} << 40);
    const uint64_t y = rng.UniformInt(uint64_t{1} << 40);
    ASSERT_LT(m(x), 256u);
    same += (x != y) && m(x) == m(y);
  }
  // Pairwise independence keeps collisions near 1 / bins.
  EXPECT_LT(static_cast<double>(same) / pairs, 3.0 / 256);
}

TEST(FrequencyOracle, EstimatesLookUpHashedBins) {
  auto o = Oracle(uint64_t{1} << 30, 1.0, true, 64);
  std::vector<uint64_t> items = {12345, 12345, 999999};
  ProtocolSession session({.noise_off = true});
  Rng rng(10);
  auto est = session.Histogram(0, "h", o, Ids(3), items, 0.1, rng);
  EXPECT_GE(est(12345), 2.0);
  EXPECT_GE(est(999999), 1.0);
}

// ---- transcripts ----

TEST(Transcript, SerializeParseRoundTrip) {
  ProtocolTranscript t;
  t.Append(0, 3, "a", {1, 2, 3});
  t.Append(0, 3, "b", {});
  t.Append(2, kServerSender, "list", {9});
  t.Append(1, 0, "a", {4});
  auto back = ProtocolTranscript::Parse(t.Serialize());
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, t);
  EXPECT_EQ(t.RoundCount(), 2u);
  EXPECT_TRUE(t.OneReportPerUserPerChannel());
  const auto bytes = t.Serialize();
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 5), "LDPT1");
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_FALSE(ProtocolTranscript::Parse(bad).ok());
  bad = bytes;
  bad.resize(bad.size() - 1);
  EXPECT_FALSE(ProtocolTranscript::Parse(bad).ok());
}

TEST(Transcript, DetectsDuplicateReports) {
  ProtocolTranscript t;
  t.Append(0, 1, "a", {1});
  t.Append(0, 1, "a", {2});
  EXPECT_FALSE(t.OneReportPerUserPerChannel());
}

TEST(Transcript, ReplayReproducesHistograms) {
  for (bool per_user : {false, true}) {
    auto o = Oracle(6, 1.0);
    ProtocolTranscript t;
    ProtocolSession session({.per_user_reports = per_user}, &t);
    std::vector<uint64_t> items = {0, 1, 1, 5, 5, 5, kNullItem, 2};
    Rng rng(11);
    auto est = session.Histogram(3, "h", o, Ids(items.size()), items, 0.1, rng);
    auto parsed = *ProtocolTranscript::Parse(t.Serialize());
    auto replay = ReplayHistogram(parsed, 3, "h", o, 0.1);
    ASSERT_TRUE(replay.ok());
    EXPECT_EQ(replay->bin_estimates(), est.bin_estimates()) << per_user;
    EXPECT_FALSE(ReplayHistogram(parsed, 4, "h", o, 0.1).ok());
  }
}

TEST(Transcript, ReplayReproducesGaussianSums) {
  for (bool per_user : {false, true}) {
    auto pts = *PointSet::Create(2, 1.0, {0.1, 0.2, -0.3, 0.4, 0.5, 0.0});
    ProtocolTranscript t;
    ProtocolSession session({.per_user_reports = per_user}, &t);
    Rng rng(12);
    auto sum = GaussianSum(session, 1, "g", pts, Ids(3), 1.0, 1e-6, rng);
    ASSERT_TRUE(sum.ok());
    auto replay = ReplayGaussianSum(t, 1, "g", 1, 2);
    ASSERT_TRUE(replay.ok());
    EXPECT_EQ(replay->coords(), *sum) << per_user;
  }
}

// ---- Gaussian sums ----

TEST(GaussianSum, NoiseOffSingleUserIsExact) {
  auto pts = *PointSet::Create(3, 1.0, {0.1, -0.2, 0.3});
  ProtocolSession session({.noise_off = true});
  Rng rng(13);
  auto sum = GaussianSum(session, 0, "g", pts, Ids(1), 1.0, 1e-6, rng);
  ASSERT_TRUE(sum.ok());
  EXPECT_EQ(*sum, (std::vector<double>{0.1, -0.2, 0.3}));
}

TEST(GaussianSum, RequiresPositiveDelta) {
  auto pts = *PointSet::Create(1, 1.0, {0.0});
  ProtocolSession session({});
  Rng rng(14);
  EXPECT_FALSE(GaussianSum(session, 0, "g", pts, Ids(1), 1.0, 0.0, rng).ok());
}

TEST(GaussianSum, ZeroInputMeanWithinStandardError) {
  const size_t n = 50, d = 3;
  auto pts = *PointSet::Create(d, 1.0, std::vector<double>(n * d, 0.0));
  const double sigma = GaussianSumSigma(1.0, 1.0, 1e-6);
  const double per_coord_sd = sigma * std::sqrt(static_cast<double>(n));
  Rng rng(15);
  std::vector<double> mean(d, 0.0);
  ProtocolSession session({});
  for (int t = 0; t < 100; ++t) {
    auto sum = *GaussianSum(session, 0, "g", pts, Ids(n), 1.0, 1e-6, rng);
    for (size_t j = 0; j < d; ++j) mean[j] += sum[j] / 100.0;
  }
  EXPECT_LE(Norm(mean), 4.0 * per_coord_sd * std::sqrt(static_cast<double>(d)) / 10.0);
}

TEST(GaussianSum, UserNoiseIsIndependent) {
  auto pts = *PointSet::Create(1, 1.0, {0.0, 0.0});
  const int trials = 4000;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  Rng rng(16);
  for (int t = 0; t < trials; ++t) {
    ProtocolTranscript tr;
    ProtocolSession session({.per_user_reports = true}, &tr);
    ASSERT_TRUE(GaussianSum(session, 0, "g", pts, Ids(2), 1.0, 1e-6, rng).ok());
    auto msgs = tr.Channel(0, "g");
    ASSERT_EQ(msgs.size(), 2u);
    double v[2];
    for (int u = 0; u < 2; ++u) {
      ByteReader r(msgs[u].second->body);
      r.U32();
      r.U32();
      v[u] = r.F64();
    }
    sxy += v[0] * v[1];
    sxx += v[0] * v[0];
    syy += v[1] * v[1];
  }
  const double corr = sxy / std::sqrt(sxx * syy);
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(trials));
}

// ---- averages ----

TEST(LdpAvg, NoiseOffSingleRegionIsExactMean) {
  auto pts = *PointSet::Create(2, 1.0, {0.1, 0.1, 0.3, -0.1, 0.2, 0.3});
  Region region;
  region.reference = {0.0, 0.0};
  region.radius = 1.0;
  auto part = *RegionPartition::Create({region});
  ProtocolSession session({.noise_off = true});
  LdpAvgParams params;
  params.reliability_multiplier = 0.0;
  Rng rng(17);
  auto avg = LdpAvg(session, 0, "avg", pts, Ids(3), part, params, rng);
  ASSERT_TRUE(avg.ok());
  ASSERT_EQ(avg->size(), 1u);
  EXPECT_NEAR((*avg)[0].mean[0], 0.2, 1e-12);
  EXPECT_NEAR((*avg)[0].mean[1], 0.1, 1e-12);
  EXPECT_DOUBLE_EQ((*avg)[0].count_estimate, 3.0);
}

TEST(LdpAvg, EmptyRegionIsUnreliable) {
  auto pts = *PointSet::Create(1, 1.0, {0.1, 0.2});
  Region a, b;
  a.reference = {0.1};
  a.radius = 0.5;
  b.reference = {-0.9};
  b.radius = 0.05;
  auto part = *RegionPartition::Create({a, b});
  ProtocolSession session({});
  Rng rng(18);
  auto avg = LdpAvg(session, 0, "avg", pts, Ids(2), part, LdpAvgParams{}, rng);
  ASSERT_TRUE(avg.ok());
  EXPECT_FALSE((*avg)[1].reliable);
}

TEST(LdpAvg, EmptyPartitionRefused) {
  EXPECT_FALSE(RegionPartition::Create({}).ok());
}

TEST(LdpAvg, SigmaMultiplierFloorIsPrivate) {
  // Centered reports have sensitivity diam; the floor multiplier calibrates
  // them for (epsilon / 2, delta).
  for (double eps : {0.5, 1.0, 2.0}) {
    const double sigma = LdpAvgSigma(1.0, eps, 1e-6, kMinSigmaMultiplier);
    EXPECT_LE(GaussianMechanismDelta(1.0, sigma, eps / 2.0), 1e-6);
  }
}

}  // namespace
}  // namespace ldpkm
