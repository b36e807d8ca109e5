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

// Fast end-to-end consistency checks shared by the `selftest` command and
// the test suite.

#ifndef LDPKM_SELFTEST_H_
#define LDPKM_SELFTEST_H_

#include <ostream>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpkm/geometry.h"
#include "ldpkm/rng.h"
#include "ldpkm/weighted_centers.h"

namespace ldpkm {

// k groups of coincident points at pairwise distance >= 0.5 inside B(0, 1),
// group sizes at least n / (2k).
absl::StatusOr<PointSet> SeparableMicroInstance(size_t n, size_t d, size_t k,
                                                Rng& rng);

// Noise-off desk configuration for micro instances (n <= a few hundred).
PipelineConfig NoiseOffMicroConfig(size_t k, Objective p);

// |a - b| <= rel * max(|a|, |b|) + abs.
bool CostsMatch(double a, double b, double rel = 1e-6, double abs = 1e-12);

// Prints one PASS/FAIL line per check; fails when any check fails.
absl::Status RunSelfTest(std::ostream& out, bool verbose);

}  // namespace ldpkm

#endif  // LDPKM_SELFTEST_H_
