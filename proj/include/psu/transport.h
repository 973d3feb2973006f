// Copyright 2026 The psu-align Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "psu/bloom_filter.h"
#include "psu/commcrypt.h"
#include "psu/sha3.h"
#include "psu/tokenizer.h"

namespace psu {

enum class MessageType : uint8_t {
  kSetTransfer = 1,
  kUnionTransfer = 2,
  kUidBroadcast = 3,
  kTokenRelay = 4,
  kTokenReturn = 5,
  kAbort = 6,
  // Fully encrypted local set handed from its originator to the active party.
  kSetForward = 7,
  kHandshake = 8,
};

inline constexpr size_t kMessageTypeCount = 9;

std::string_view MessageTypeName(MessageType type);

struct ProtocolMessage {
  MessageType type = MessageType::kAbort;
  uint16_t origin = 0;
  uint16_t hop = 0;
  std::vector<uint8_t> payload;
};

// Frame: u32 payload length | u8 type | u16 origin | u16 hop | payload, all
// big-endian.
inline constexpr size_t kFrameHeaderBytes = 9;
inline constexpr uint32_t kMaxPayloadBytes = 1u << 30;

std::vector<uint8_t> EncodeFrame(const ProtocolMessage& msg);
// Decodes exactly one frame; trailing or missing bytes raise FramingError.
ProtocolMessage DecodeFrame(std::span<const uint8_t> frame);

struct MessageCounts {
  std::array<uint64_t, kMessageTypeCount> by_type{};

  uint64_t operator[](MessageType t) const {
    return by_type[static_cast<size_t>(t)];
  }
  uint64_t& operator[](MessageType t) {
    return by_type[static_cast<size_t>(t)];
  }
  MessageCounts& operator+=(const MessageCounts& other);
  friend bool operator==(const MessageCounts&, const MessageCounts&) = default;
};

struct Envelope {
  int from = -1;
  ProtocolMessage msg;
};

// Blocking FIFO that serializes everything a party receives.
class Inbox {
 public:
  void Push(Envelope env);
  // Throws Timeout when nothing arrives in time.
  Envelope Pop(std::chrono::milliseconds timeout);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Envelope> queue_;
};

// One party's view of the network. Delivery is exactly-once and in order per
// directed pair; sends to self loop back through the inbox.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int self() const = 0;
  virtual int parties() const = 0;
  // Throws PeerUnreachable for unknown ids or dead links.
  virtual void Send(int to, ProtocolMessage msg) = 0;
  virtual Envelope Receive(std::chrono::milliseconds timeout) = 0;
  // Messages this endpoint has sent, per type.
  virtual MessageCounts sent_counts() const = 0;
};

// Everything all parties must agree on before identifier data flows.
struct SessionConfig {
  int parties = 2;
  int self = 0;
  std::vector<std::string> addresses;  // host:port per party (networked)
  std::string group_preset;
  EncryptionMode variant = EncryptionMode::kOrdered;
  MatchConfig match;
  BloomOptions bloom;

  // SHA3-256 over a canonical rendering of (P, group, variant, match, bloom).
  Digest256 Digest() const;
};

// Exchanges config digests with every peer. Protocol messages that arrive
// before all digests are in are returned in arrival order for the caller to
// process first. Mismatch sends Abort to all peers and throws
// ConfigDigestMismatch.
std::deque<Envelope> Handshake(Transport& transport, const Digest256& digest,
                               std::chrono::milliseconds timeout);

struct InProcessOptions {
  // Each send sleeps a random 0..max_jitter microseconds first, perturbing
  // the interleaving across senders.
  uint32_t max_jitter_us = 0;
  uint64_t jitter_seed = 0;
  // Observes every frame (from, to, msg); called serialized.
  std::function<void(int, int, const ProtocolMessage&)> tap;
};

class InProcessNetwork {
 public:
  explicit InProcessNetwork(int parties, InProcessOptions options = {});
  ~InProcessNetwork();

  Transport& endpoint(int party);
  int parties() const { return static_cast<int>(inboxes_.size()); }
  // Sum over all endpoints.
  MessageCounts total_counts() const;

 private:
  class Endpoint;
  friend class Endpoint;

  InProcessOptions options_;
  std::vector<std::unique_ptr<Inbox>> inboxes_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;
  std::mutex tap_mu_;
};

// Full mesh of TCP connections. Party i listens on addresses[i]; it dials
// every lower id and accepts every higher id. Construction throws Timeout if
// the mesh is not up within the deadline.
class TcpTransport : public Transport {
 public:
  TcpTransport(int self, std::vector<std::string> addresses,
               std::chrono::milliseconds connect_timeout);
  ~TcpTransport() override;

  int self() const override { return self_; }
  int parties() const override { return static_cast<int>(addresses_.size()); }
  void Send(int to, ProtocolMessage msg) override;
  Envelope Receive(std::chrono::milliseconds timeout) override;
  MessageCounts sent_counts() const override;

 private:
  struct Peer;
  void ReaderLoop(int peer);

  int self_;
  std::vector<std::string> addresses_;
  int listen_fd_ = -1;
  std::vector<std::unique_ptr<Peer>> peers_;
  Inbox inbox_;
  mutable std::mutex count_mu_;
  MessageCounts sent_;
};

}  // namespace psu
