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

#include "ldpkm/transcript.h"

#include <fstream>
#include <iterator>
#include <set>

#include "absl/strings/str_cat.h"
#include "ldpkm/bytes.h"

namespace ldpkm {
namespace {

constexpr char kMagic[] = "LDPT1";
constexpr size_t kMagicLen = 5;

}  // namespace

void ProtocolTranscript::Append(uint32_t round, uint32_t user,
                                std::string channel,
                                std::vector<uint8_t> body) {
  records_[{round, user}].push_back({std::move(channel), std::move(body)});
}

std::vector<TranscriptRecord> ProtocolTranscript::Records() const {
  std::vector<TranscriptRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, msgs] : records_) {
    out.push_back({key.first, key.second, msgs});
  }
  return out;
}

size_t ProtocolTranscript::RoundCount() const {
  std::set<uint32_t> rounds;
  for (const auto& [key, msgs] : records_) {
    if (key.second != kServerSender) rounds.insert(key.first);
  }
  return rounds.size();
}

std::vector<std::pair<uint32_t, const ChannelMessage*>>
ProtocolTranscript::Channel(uint32_t round, const std::string& channel) const {
  std::vector<std::pair<uint32_t, const ChannelMessage*>> out;
  auto it = records_.lower_bound({round, 0});
  for (; it != records_.end() && it->first.first == round; ++it) {
    for (const auto& m : it->second) {
      if (m.channel == channel) out.emplace_back(it->first.second, &m);
    }
  }
  return out;
}

bool ProtocolTranscript::OneReportPerUserPerChannel() const {
  for (const auto& [key, msgs] : records_) {
    if (key.second == kServerSender) continue;
    std::set<std::string> seen;
    for (const auto& m : msgs) {
      if (!seen.insert(m.channel).second) return false;
    }
  }
  return true;
}

std::vector<uint8_t> ProtocolTranscript::Serialize() const {
  ByteWriter w;
  w.Str(std::string_view(kMagic, kMagicLen));
  for (const auto& [key, msgs] : records_) {
    ByteWriter p;
    p.U32(static_cast<uint32_t>(msgs.size()));
    for (const auto& m : msgs) {
      p.U16(static_cast<uint16_t>(m.channel.size()));
      p.Str(m.channel);
      p.U32(static_cast<uint32_t>(m.body.size()));
      p.Raw(m.body);
    }
    w.U32(key.first);
    w.U32(key.second);
    w.U32(static_cast<uint32_t>(p.bytes().size()));
    w.Raw(p.bytes());
  }
  return w.Take();
}

absl::StatusOr<ProtocolTranscript> ProtocolTranscript::Parse(
    std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.Str(kMagicLen) != std::string_view(kMagic, kMagicLen)) {
    return absl::InvalidArgumentError("missing LDPT1 header");
  }
  ProtocolTranscript t;
  while (r.ok() && !r.done()) {
    const uint32_t round = r.U32();
    const uint32_t user = r.U32();
    const uint32_t len = r.U32();
    ByteReader p(r.Raw(len));
    if (!r.ok()) break;
    const uint32_t count = p.U32();
    for (uint32_t i = 0; i < count && p.ok(); ++i) {
      std::string channel = p.Str(p.U16());
      auto body = p.Raw(p.U32());
      t.Append(round, user, std::move(channel),
               std::vector<uint8_t>(body.begin(), body.end()));
    }
    if (!p.ok() || !p.done()) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed payload for round ", round, " user ", user));
    }
  }
  if (!r.ok()) return absl::InvalidArgumentError("truncated transcript");
  return t;
}

absl::Status ProtocolTranscript::WriteFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  const auto bytes = Serialize();
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return out ? absl::OkStatus() : absl::DataLossError("short write");
}

absl::StatusOr<ProtocolTranscript> ProtocolTranscript::ReadFile(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return Parse(bytes);
}

}  // namespace ldpkm
