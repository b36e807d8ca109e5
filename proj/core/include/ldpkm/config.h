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

// Experiment configuration: plain-text key=value pairs grouped in sections.
// Every field has a default; unknown keys are rejected.

#ifndef LDPKM_CONFIG_H_
#define LDPKM_CONFIG_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "ldpkm/weighted_centers.h"

namespace ldpkm {

// Gaussian mixture in the ball B(0, Lambda).
struct GeneratorSpec {
  size_t components = 5;
  double sigma = 0.02;
  // Minimum distance between means, in units of sigma.
  double separation = 10.0;
  // Means lie in B(0, means_radius); negative selects Lambda - 3 sigma.
  double means_radius = -1.0;
  // Fraction of points drawn uniformly from the ball.
  double background = 0.0;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct ExperimentConfig {
  uint64_t n = 65536;
  size_t d = 8;
  double lambda = 1.0;
  // Root seed; components derive their streams from it by name.
  uint64_t seed = 1;
  PipelineConfig pipeline;
  GeneratorSpec generator;
  // additive_residual = cost_private - ratio_cap * cost_baseline.
  double ratio_cap = 1.0;
  std::string output = "run";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

absl::StatusOr<ExperimentConfig> ParseConfig(const std::string& text);
std::string EmitConfig(const ExperimentConfig& config);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// Applies one "section.key=value" override.
absl::Status SetConfigValue(ExperimentConfig& config, const std::string& key,
                            const std::string& value);

}  // namespace ldpkm

#endif  // LDPKM_CONFIG_H_
