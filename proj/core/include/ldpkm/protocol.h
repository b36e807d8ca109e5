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

// Simulation of one server talking to many users.
//
// Every query can run in one of two modes that produce identically
// distributed server views:
//  - per-user: each user's randomizer runs and its report is recorded;
//  - aggregate: the server-side sufficient statistic (bit counts, noisy sums)
//    is sampled directly and recorded under kAggregateSender.
// The aggregate mode is what makes n = 2^16 and beyond practical on one core.

#ifndef LDPKM_PROTOCOL_H_
#define LDPKM_PROTOCOL_H_

#include <cstdint>
#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "ldpkm/frequency_oracle.h"
#include "ldpkm/geometry.h"
#include "ldpkm/rng.h"
#include "ldpkm/transcript.h"

namespace ldpkm {

struct SimulationOptions {
  // Debug: every randomizer becomes the identity. Never private.
  bool noise_off = false;
  bool per_user_reports = false;

  friend bool operator==(const SimulationOptions&, const SimulationOptions&) = default;
};

class ProtocolSession {
 public:
  explicit ProtocolSession(SimulationOptions options,
                           ProtocolTranscript* transcript = nullptr)
      : options_(options), transcript_(transcript) {}

  const SimulationOptions& options() const { return options_; }
  ProtocolTranscript* transcript() const { return transcript_; }

  // One frequency query; items[i] belongs to user_ids[i] (kNullItem allowed).
  FrequencyEstimate Histogram(uint32_t round, const std::string& channel,
                              const UnaryFrequencyOracle& oracle,
                              std::span<const uint32_t> user_ids,
                              std::span<const uint64_t> items, double beta,
                              Rng& rng);

  // Gaussian vector reports over slots. Every participating user sends one
  // d-vector per slot: values[i] in slot slot_of_user[i] (nothing when the
  // slot is negative) plus N(0, sigma[s]^2 I) in every slot s. Returns the
  // per-slot sums, one row per slot.
  VectorList SlottedGaussianSum(uint32_t round, const std::string& channel,
                                std::span<const uint32_t> user_ids,
                                const VectorList& values,
                                std::span<const int64_t> slot_of_user,
                                std::span<const double> sigma, Rng& rng);

  void Broadcast(uint32_t round, const std::string& channel,
                 std::vector<uint8_t> body);

 private:
  SimulationOptions options_;
  ProtocolTranscript* transcript_;
};

// Server-side recomputation from a recorded transcript.
absl::StatusOr<FrequencyEstimate> ReplayHistogram(
    const ProtocolTranscript& transcript, uint32_t round,
    const std::string& channel, const UnaryFrequencyOracle& oracle,
    double beta);
absl::StatusOr<VectorList> ReplayGaussianSum(
    const ProtocolTranscript& transcript, uint32_t round,
    const std::string& channel, size_t num_slots, size_t dim);

}  // namespace ldpkm

#endif  // LDPKM_PROTOCOL_H_
