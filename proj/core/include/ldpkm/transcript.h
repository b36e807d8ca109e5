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

// The adversary's view of a protocol run.
//
// Each record is one participant's message for one interaction round. When a
// user takes part in several parallel sub-protocols during a round, their
// messages are bundled into that single record, tagged by channel name.
//
// File format: the 5 bytes "LDPT1", then records of
//   u32 round, u32 user, u32 payload_length, payload
// all little-endian. A payload is u32 message count followed by
//   u16 channel_length, channel, u32 body_length, body
// for each message.

#ifndef LDPKM_TRANSCRIPT_H_
#define LDPKM_TRANSCRIPT_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace ldpkm {

// Pseudo-user ids. Server broadcasts use kServerSender; rounds simulated at the
// aggregate level store their sufficient statistic under kAggregateSender.
inline constexpr uint32_t kServerSender = 0xFFFFFFFFu;
inline constexpr uint32_t kAggregateSender = 0xFFFFFFFEu;

struct ChannelMessage {
  std::string channel;
  std::vector<uint8_t> body;
  friend bool operator==(const ChannelMessage&, const ChannelMessage&) = default;
};

struct TranscriptRecord {
  uint32_t round;
  uint32_t user;
  std::vector<ChannelMessage> messages;
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

class ProtocolTranscript {
 public:
  void Append(uint32_t round, uint32_t user, std::string channel,
              std::vector<uint8_t> body);

  // Records ordered by (round, user).
  std::vector<TranscriptRecord> Records() const;
  size_t record_count() const { return records_.size(); }
  // Number of distinct rounds in which some user (or aggregate) reported.
  size_t RoundCount() const;
  // Messages on one channel in one round, ordered by user id.
  std::vector<std::pair<uint32_t, const ChannelMessage*>> Channel(
      uint32_t round, const std::string& channel) const;
  // True when no user sent two messages on one channel in one round.
  bool OneReportPerUserPerChannel() const;

  std::vector<uint8_t> Serialize() const;
  static absl::StatusOr<ProtocolTranscript> Parse(std::span<const uint8_t> bytes);
  absl::Status WriteFile(const std::string& path) const;
  static absl::StatusOr<ProtocolTranscript> ReadFile(const std::string& path);

  friend bool operator==(const ProtocolTranscript&, const ProtocolTranscript&) = default;

 private:
  std::map<std::pair<uint32_t, uint32_t>, std::vector<ChannelMessage>> records_;
};

}  // namespace ldpkm

#endif  // LDPKM_TRANSCRIPT_H_
