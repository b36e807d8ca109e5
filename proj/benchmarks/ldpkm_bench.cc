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

#include <numeric>
#include <vector>

#include "benchmark/benchmark.h"
#include "ldpkm/experiment.h"
#include "ldpkm/frequency_oracle.h"
#include "ldpkm/gaussian_mechanism.h"
#include "ldpkm/lsh.h"
#include "ldpkm/protocol.h"
#include "ldpkm/solver.h"
#include "ldpkm/weighted_centers.h"

namespace ldpkm {
namespace {

PointSet Mixture(uint64_t n, size_t d) {
  GeneratorSpec g;
  g.components = 5;
  g.sigma = 0.02;
  Rng rng(1);
  return GenerateMixture(n, d, 1.0, g, rng)->points;
}

void BM_HistogramAggregate(benchmark::State& state) {
  const uint64_t n = state.range(0);
  FrequencyOracleConfig c;
  c.domain_size = uint64_t{1} << 40;
  c.epsilon = 1.0;
  auto oracle = *UnaryFrequencyOracle::Create(c);
  std::vector<uint64_t> items(n);
  Rng rng(2);
  for (auto& x : items) x = rng.UniformInt(c.domain_size);
  std::vector<uint32_t> users(n);
  std::iota(users.begin(), users.end(), 0u);
  ProtocolSession session({});
  for (auto _ : state) {
    benchmark::DoNotOptimize(session.Histogram(0, "h", oracle, users, items, 0.1, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_HistogramAggregate)->Arg(1 << 14)->Arg(1 << 17);

void BM_UnaryEncode(benchmark::State& state) {
  FrequencyOracleConfig c;
  c.domain_size = state.range(0);
  c.epsilon = 1.0;
  auto oracle = *UnaryFrequencyOracle::Create(c);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(oracle.Encode(1, rng));
}
BENCHMARK(BM_UnaryEncode)->Arg(16)->Arg(1 << 12);

void BM_LshHash(benchmark::State& state) {
  const size_t d = state.range(0);
  auto spec = *BuildFamily(d, 1 << 16, 0.05, 0.2, 0.1);
  Rng rng(4);
  auto h = HashFunction::Sample(spec, rng);
  std::vector<double> x(d, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(h(x));
}
BENCHMARK(BM_LshHash)->Arg(8)->Arg(32);

void BM_BuildFamily(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(BuildFamily(10, 1 << 14, 0.1, 0.2, 0.1));
}
BENCHMARK(BM_BuildFamily);

void BM_Solve(benchmark::State& state) {
  auto pts = WeightedPointSet::Unit(Mixture(state.range(0), 8));
  SolverConfig cfg;
  cfg.restarts = 1;
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(Solve(pts, 5, Objective::kMeans, cfg, rng));
  }
}
BENCHMARK(BM_Solve)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const uint64_t n = state.range(0);
  auto pts = Mixture(n, 8);
  PipelineConfig c;
  c.k = 5;
  c.epsilon = 64.0;
  c.radius_top = 0.2;
  c.radius_levels = 3;
  c.t = n / 8.0;
  c.repetitions = 1;
  c.c_W = 1e-3;
  c.relaxed_lsh = true;
  c.lsh_q = 0.05;
  c.thresholds.heavy_select = 0.5;
  c.thresholds.sigma_multiplier = kMinSigmaMultiplier;
  for (auto _ : state) {
    Rng rng(6);
    benchmark::DoNotOptimize(WeightedCenters(pts, c, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Pipeline)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ldpkm

BENCHMARK_MAIN();
