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

// Experiment plumbing behind the command-line tool: synthetic data, run
// artifacts, evaluation and the scaling study.

#ifndef LDPKM_EXPERIMENT_H_
#define LDPKM_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpkm/claims_audit.h"
#include "ldpkm/config.h"
#include "ldpkm/transcript.h"
#include "ldpkm/weighted_centers.h"

namespace ldpkm {

struct GeneratedData {
  PointSet points;
  std::vector<uint32_t> labels;  // component index, or components for background
  VectorList means;
};

// Mixture of spherical Gaussians with means in B(0, means_radius) at pairwise
// distance >= separation * sigma; draws outside B(0, Lambda) are redrawn.
// Refuses infeasible mixtures.
absl::StatusOr<GeneratedData> GenerateMixture(uint64_t n, size_t d,
                                              double lambda,
                                              const GeneratorSpec& spec,
                                              Rng& rng);
// Uses the config's sizes and its "gen" stream.
absl::StatusOr<GeneratedData> GenerateMixture(const ExperimentConfig& config);

struct PlantedCluster {
  PointSet points;
  std::vector<double> center;
  std::vector<uint32_t> members;  // ascending indices of the planted points
};

// `size` points uniform in B(center, radius) with the center uniform in
// B(0, Lambda / 2); the other points uniform in B(0, Lambda).
absl::StatusOr<PlantedCluster> PlantCluster(uint64_t n, size_t d, double lambda,
                                            uint64_t size, double radius,
                                            Rng& rng);

// FNV-1a of the canonical point-file text.
uint64_t PointsDigest(const PointSet& points);

struct RunOutcome {
  PipelineResult result;
  ProtocolTranscript transcript;
  std::optional<ClaimsReport> claims;
  double cost_private = 0.0;
};

// Runs the pipeline with the config's "run" stream. Claims are audited when
// the config asks for instrumentation.
absl::StatusOr<RunOutcome> RunPipeline(const ExperimentConfig& config,
                                       const PointSet& points,
                                       std::optional<double> baseline_cost = {});

// Writes config.ini, manifest.ini, transcript.ldpt, ledger.csv,
// candidates.csv, centers.csv, audit.csv and goodcenters_r<j>.csv.
absl::Status WriteRunArtifacts(const std::string& dir,
                               const ExperimentConfig& config,
                               const PointSet& points, const RunOutcome& run);

// Non-private baseline: the configured solver on the raw points, with the
// config's "baseline" stream.
absl::StatusOr<double> BaselineCost(const ExperimentConfig& config,
                                    const PointSet& points);

struct EvalMetrics {
  double cost_private = 0.0;
  double cost_baseline = 0.0;
  double ratio = 0.0;
  double additive_residual = 0.0;
  std::optional<double> opt_discrete;
};

// Reads centers.csv and manifest.ini from a run directory; refuses when the
// manifest's digest does not match the points.
absl::StatusOr<EvalMetrics> Evaluate(const std::string& dir,
                                     const PointSet& points);
// "cost_private,cost_baseline,ratio,additive_residual,opt_discrete".
std::string EvalCsv(const EvalMetrics& m);

struct ScaleCell {
  uint64_t n = 0;
  std::vector<double> residuals;
  size_t refused = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ScaleReport {
  std::vector<ScaleCell> cells;
  double slope = 0.0;
  double intercept = 0.0;
  // "ok", "flat" (some mean residual <= 0, slope NaN) or "partial" (some
  // run refused).
  std::string flag = "ok";
};

// Per n, `seeds` runs on fresh data from the template's generator. A fixed
// threshold pipeline.t is rescaled in proportion to n.
absl::StatusOr<ScaleReport> Scale(const ExperimentConfig& base,
                                  const std::vector<uint64_t>& n_grid,
                                  size_t seeds);
// "n,seeds,mean_residual,ci95_low,ci95_high,refused".
std::string ScaleCsv(const ScaleReport& report);

// Least-squares fit of log(y) on log(x).
std::pair<double, double> LogLogFit(const std::vector<double>& x,
                                    const std::vector<double>& y);

}  // namespace ldpkm

#endif  // LDPKM_EXPERIMENT_H_
