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

#include "ldpkm/protocol.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "ldpkm/bytes.h"

namespace ldpkm {

FrequencyEstimate ProtocolSession::Histogram(
    uint32_t round, const std::string& channel,
    const UnaryFrequencyOracle& oracle, std::span<const uint32_t> user_ids,
    std::span<const uint64_t> items, double beta, Rng& rng) {
  const uint64_t n = items.size();
  std::vector<uint64_t> ones;
  if (options_.per_user_reports) {
    ones.assign(oracle.num_bins(), 0);
    for (size_t i = 0; i < items.size(); ++i) {
      UnaryReport rep = oracle.Encode(items[i], rng);
      for (uint32_t j = 0; j < rep.num_bins; ++j) ones[j] += rep.bit(j);
      if (transcript_ != nullptr) {
        transcript_->Append(round, user_ids[i], channel, rep.Serialize());
      }
    }
  } else {
    ones = oracle.SampleOnes(oracle.BinCounts(items), n, rng);
    if (transcript_ != nullptr) {
      ByteWriter w;
      w.U64(oracle.config_tag());
      w.U64(n);
      w.U32(oracle.num_bins());
      for (uint64_t c : ones) w.U32(static_cast<uint32_t>(c));
      transcript_->Append(round, kAggregateSender, channel, w.Take());
    }
  }
  return oracle.EstimateFromOnes(ones, n, beta);
}

VectorList ProtocolSession::SlottedGaussianSum(
    uint32_t round, const std::string& channel,
    std::span<const uint32_t> user_ids, const VectorList& values,
    std::span<const int64_t> slot_of_user, std::span<const double> sigma,
    Rng& rng) {
  const size_t d = values.dim();
  const size_t slots = sigma.size();
  const size_t n = user_ids.size();
  VectorList sums(d, std::vector<double>(slots * d, 0.0));
  const bool noisy = !options_.noise_off;
  if (options_.per_user_reports) {
    std::vector<double> report(slots * d);
    for (size_t i = 0; i < n; ++i) {
      for (size_t s = 0; s < slots; ++s) {
        for (size_t j = 0; j < d; ++j) {
          report[s * d + j] = noisy ? sigma[s] * rng.Normal() : 0.0;
        }
      }
      if (slot_of_user[i] >= 0) {
        const auto x = values[i];
        for (size_t j = 0; j < d; ++j) report[slot_of_user[i] * d + j] += x[j];
      }
      for (size_t s = 0; s < slots; ++s) {
        auto row = sums.mutable_row(s);
        for (size_t j = 0; j < d; ++j) row[j] += report[s * d + j];
      }
      if (transcript_ != nullptr) {
        ByteWriter w;
        w.U32(static_cast<uint32_t>(slots));
        w.U32(static_cast<uint32_t>(d));
        for (double v : report) w.F64(v);
        transcript_->Append(round, user_ids[i], channel, w.Take());
      }
    }
    return sums;
  }
  for (size_t i = 0; i < n; ++i) {
    if (slot_of_user[i] < 0) continue;
    auto row = sums.mutable_row(slot_of_user[i]);
    const auto x = values[i];
    for (size_t j = 0; j < d; ++j) row[j] += x[j];
  }
  if (noisy) {
    // A sum of n independent N(0, s^2) draws is N(0, n s^2).
    const double root_n = std::sqrt(static_cast<double>(n));
    for (size_t s = 0; s < slots; ++s) {
      auto row = sums.mutable_row(s);
      for (size_t j = 0; j < d; ++j) row[j] += root_n * sigma[s] * rng.Normal();
    }
  }
  if (transcript_ != nullptr) {
    ByteWriter w;
    w.U64(n);
    w.U32(static_cast<uint32_t>(slots));
    w.U32(static_cast<uint32_t>(d));
    for (double v : sums.coords()) w.F64(v);
    transcript_->Append(round, kAggregateSender, channel, w.Take());
  }
  return sums;
}

void ProtocolSession::Broadcast(uint32_t round, const std::string& channel,
                                std::vector<uint8_t> body) {
  if (transcript_ != nullptr) {
    transcript_->Append(round, kServerSender, channel, std::move(body));
  }
}

absl::StatusOr<FrequencyEstimate> ReplayHistogram(
    const ProtocolTranscript& transcript, uint32_t round,
    const std::string& channel, const UnaryFrequencyOracle& oracle,
    double beta) {
  auto msgs = transcript.Channel(round, channel);
  if (msgs.empty()) {
    return absl::NotFoundError(
        absl::StrCat("no messages on ", channel, " in round ", round));
  }
  if (msgs.size() == 1 && msgs[0].first == kAggregateSender) {
    ByteReader r(msgs[0].second->body);
    const uint64_t tag = r.U64();
    const uint64_t n = r.U64();
    const uint32_t bins = r.U32();
    if (tag != oracle.config_tag() || bins != oracle.num_bins()) {
      return absl::InvalidArgumentError("aggregate from another configuration");
    }
    std::vector<uint64_t> ones(bins);
    for (auto& c : ones) c = r.U32();
    if (!r.ok() || !r.done()) return absl::InvalidArgumentError("bad aggregate");
    return oracle.EstimateFromOnes(ones, n, beta);
  }
  std::vector<UnaryReport> reports;
  reports.reserve(msgs.size());
  for (const auto& [user, msg] : msgs) {
    auto rep = UnaryReport::Parse(msg->body);
    if (!rep.ok()) return rep.status();
    reports.push_back(*std::move(rep));
  }
  return oracle.Aggregate(reports, beta);
}

absl::StatusOr<VectorList> ReplayGaussianSum(
    const ProtocolTranscript& transcript, uint32_t round,
    const std::string& channel, size_t num_slots, size_t dim) {
  auto msgs = transcript.Channel(round, channel);
  if (msgs.empty()) {
    return absl::NotFoundError(
        absl::StrCat("no messages on ", channel, " in round ", round));
  }
  VectorList sums(dim, std::vector<double>(num_slots * dim, 0.0));
  if (msgs.size() == 1 && msgs[0].first == kAggregateSender) {
    ByteReader r(msgs[0].second->body);
    r.U64();
    if (r.U32() != num_slots || r.U32() != dim) {
      return absl::InvalidArgumentError("aggregate shape mismatch");
    }
    for (size_t s = 0; s < num_slots; ++s) {
      auto row = sums.mutable_row(s);
      for (size_t j = 0; j < dim; ++j) row[j] = r.F64();
    }
    if (!r.ok()) return absl::InvalidArgumentError("bad aggregate");
    return sums;
  }
  for (const auto& [user, msg] : msgs) {
    ByteReader r(msg->body);
    if (r.U32() != num_slots || r.U32() != dim) {
      return absl::InvalidArgumentError("report shape mismatch");
    }
    for (size_t s = 0; s < num_slots; ++s) {
      auto row = sums.mutable_row(s);
      for (size_t j = 0; j < dim; ++j) row[j] += r.F64();
    }
    if (!r.ok()) return absl::InvalidArgumentError("bad report");
  }
  return sums;
}

}  // namespace ldpkm
