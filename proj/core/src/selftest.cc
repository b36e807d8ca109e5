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

#include "ldpkm/selftest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "ldpkm/config.h"
#include "ldpkm/dp_audit.h"
#include "ldpkm/lsh.h"
#include "ldpkm/transcript.h"

namespace ldpkm {

absl::StatusOr<PointSet> SeparableMicroInstance(size_t n, size_t d, size_t k,
                                                Rng& rng) {
  if (k == 0 || n < 2 * k) return absl::InvalidArgumentError("need n >= 2k");
  VectorList sites(d);
  for (int attempt = 0; sites.size() < k && attempt < 100000; ++attempt) {
    std::vector<double> x(d);
    for (double& v : x) v = rng.Uniform(-1.0, 1.0);
    if (Norm(x) > 0.9) continue;
    bool ok = true;
    for (size_t j = 0; j < sites.size() && ok; ++j) ok = Distance(x, sites[j]) >= 0.5;
    if (ok) sites.Append(x);
  }
  if (sites.size() < k) return absl::FailedPreconditionError("cannot place sites");
  // Sizes: n / (2k) each, the rest spread uniformly at random.
  std::vector<size_t> sizes(k, n / (2 * k));
  for (size_t i = k * (n / (2 * k)); i < n; ++i) ++sizes[rng.UniformInt(k)];
  std::vector<double> coords;
  for (size_t g = 0; g < k; ++g) {
    for (size_t i = 0; i < sizes[g]; ++i) {
      coords.insert(coords.end(), sites[g].begin(), sites[g].end());
    }
  }
  return PointSet::Create(d, 1.0, std::move(coords));
}

PipelineConfig NoiseOffMicroConfig(size_t k, Objective p) {
  PipelineConfig c;
  c.mode = Mode::kDesk;
  c.k = k;
  c.objective = p;
  c.epsilon = 1.0;
  c.delta = 1e-6;
  c.beta = 0.1;
  c.repetitions = 1;
  c.t = 40.0;
  c.c_W = 1e-9;
  c.simulation.noise_off = true;
  return c;
}

bool CostsMatch(double a, double b, double rel, double abs) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
}

absl::Status RunSelfTest(std::ostream& out, bool verbose) {
  size_t failed = 0;
  auto check = [&](const std::string& name, const std::function<std::string()>& fn) {
    const std::string err = fn();
    out << (err.empty() ? "PASS " : "FAIL ") << name;
    if (!err.empty() || verbose) out << (err.empty() ? "" : ": ") << err;
    out << "\n";
    failed += !err.empty();
  };
  Rng root(20240531);

  check("config round trip", [&]() -> std::string {
    ExperimentConfig c;
    c.pipeline.epsilon = 0.1;
    c.pipeline.thresholds.capture = 3.25;
    c.output = "somewhere";
    auto back = ParseConfig(EmitConfig(c));
    if (!back.ok()) return std::string(back.status().message());
    return *back == c ? "" : "parsed config differs";
  });

  check("oracle likelihood ratio", [&]() -> std::string {
    FrequencyOracleConfig fc;
    fc.domain_size = 8;
    fc.epsilon = 1.0;
    auto oracle = UnaryFrequencyOracle::Create(fc);
    if (!oracle.ok()) return std::string(oracle.status().message());
    auto audit = AuditUnaryOracle(*oracle);
    if (!audit.ok()) return std::string(audit.status().message());
    return audit->passed ? "" : absl::StrCat("max ratio ", audit->max_ratio);
  });

  check("hash blob round trip", [&]() -> std::string {
    auto spec = BuildFamily(4, 1024, 0.1, 0.2, 0.1);
    if (!spec.ok()) return std::string(spec.status().message());
    Rng r = root.Fork("hash");
    const HashFunction h = HashFunction::Sample(*spec, r);
    auto back = HashFunction::Deserialize(h.Serialize());
    if (!back.ok()) return std::string(back.status().message());
    return *back == h ? "" : "deserialized hash differs";
  });

  check("noise-off pipeline matches solver", [&]() -> std::string {
    Rng r = root.Fork("micro");
    auto points = SeparableMicroInstance(120, 3, 3, r);
    if (!points.ok()) return std::string(points.status().message());
    const PipelineConfig config = NoiseOffMicroConfig(3, Objective::kMeans);
    ProtocolTranscript transcript;
    Rng run_rng = r.Fork("run");
    auto res = WeightedCenters(*points, config, run_rng, &transcript);
    if (!res.ok()) return std::string(res.status().message());
    auto cost = Cost(*points, res->solve->centers, config.objective);
    Rng solve_rng = r.Fork("solve");
    auto direct = Solve(WeightedPointSet::Unit(*points), config.k,
                        config.objective, config.solver, solve_rng);
    if (!cost.ok() || !direct.ok()) return "cost evaluation failed";
    auto cap = PrivacyBudget::Create(config.epsilon, config.delta);
    if (!res->ledger.FitsWithin(*cap)) return "ledger exceeds the budget";
    if (transcript.RoundCount() > 7) {
      return absl::StrCat(transcript.RoundCount(), " rounds");
    }
    if (!CostsMatch(*cost, direct->cost)) {
      return absl::StrCat("pipeline ", *cost, " vs solver ", direct->cost);
    }
    return "";
  });

  if (failed > 0) {
    return absl::InternalError(absl::StrCat(failed, " self-test check(s) failed"));
  }
  return absl::OkStatus();
}

}  // namespace ldpkm
