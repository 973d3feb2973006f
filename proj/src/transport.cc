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

#include "psu/transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "psu/bytes.h"
#include "psu/error.h"
#include "psu/random.h"

namespace psu {
namespace {

using Clock = std::chrono::steady_clock;

constexpr uint32_t kHelloMagic = 0x50535531;  // "PSU1"

std::pair<std::string, std::string> SplitHostPort(const std::string& addr) {
  auto colon = addr.rfind(':');
  PSU_ENFORCE(colon != std::string::npos && colon + 1 < addr.size(),
              ErrorCode::kConfigError,
              "address '" + addr + "' is not host:port");
  return {addr.substr(0, colon), addr.substr(colon + 1)};
}

sockaddr_in Resolve(const std::string& addr) {
  auto [host, port] = SplitHostPort(addr);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &res);
  PSU_ENFORCE(rc == 0 && res != nullptr, ErrorCode::kPeerUnreachable,
              "cannot resolve '" + addr + "': " + gai_strerror(rc));
  sockaddr_in out{};
  std::memcpy(&out, res->ai_addr, sizeof(out));
  freeaddrinfo(res);
  return out;
}

// True when all n bytes arrived; false on orderly EOF or error.
bool ReadFull(int fd, uint8_t* buf, size_t n) {
  size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    got += static_cast<size_t>(r);
  }
  return true;
}

bool WriteFull(int fd, const uint8_t* buf, size_t n) {
  size_t sent = 0;
  while (sent < n) {
    ssize_t r = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<size_t>(r);
  }
  return true;
}

bool WaitReadable(int fd, Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  if (left.count() <= 0) return false;
  pollfd p{fd, POLLIN, 0};
  int rc = ::poll(&p, 1, static_cast<int>(left.count()));
  return rc > 0;
}

void SetNoDelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

std::string_view MessageTypeName(MessageType type) {
  switch (type) {
    case MessageType::kSetTransfer: return "SetTransfer";
    case MessageType::kUnionTransfer: return "UnionTransfer";
    case MessageType::kUidBroadcast: return "UidBroadcast";
    case MessageType::kTokenRelay: return "TokenRelay";
    case MessageType::kTokenReturn: return "TokenReturn";
    case MessageType::kAbort: return "Abort";
    case MessageType::kSetForward: return "SetForward";
    case MessageType::kHandshake: return "Handshake";
  }
  return "Unknown";
}

std::vector<uint8_t> EncodeFrame(const ProtocolMessage& msg) {
  PSU_ENFORCE(msg.payload.size() <= kMaxPayloadBytes, ErrorCode::kFramingError,
              "payload too large");
  std::vector<uint8_t> out;
  out.reserve(kFrameHeaderBytes + msg.payload.size());
  PutU32(out, static_cast<uint32_t>(msg.payload.size()));
  PutU8(out, static_cast<uint8_t>(msg.type));
  PutU16(out, msg.origin);
  PutU16(out, msg.hop);
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

ProtocolMessage DecodeFrame(std::span<const uint8_t> frame) {
  ByteReader in(frame);
  uint32_t length = in.U32();
  ProtocolMessage msg;
  uint8_t type = in.U8();
  PSU_ENFORCE(type >= 1 && type < kMessageTypeCount, ErrorCode::kFramingError,
              "unknown message type " + std::to_string(type));
  msg.type = static_cast<MessageType>(type);
  msg.origin = in.U16();
  msg.hop = in.U16();
  PSU_ENFORCE(length == in.remaining(), ErrorCode::kFramingError,
              "length prefix " + std::to_string(length) + " but " +
                  std::to_string(in.remaining()) + " payload bytes");
  auto payload = in.Take(length);
  msg.payload.assign(payload.begin(), payload.end());
  return msg;
}

MessageCounts& MessageCounts::operator+=(const MessageCounts& other) {
  for (size_t i = 0; i < by_type.size(); ++i) by_type[i] += other.by_type[i];
  return *this;
}

void Inbox::Push(Envelope env) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    queue_.push_back(std::move(env));
  }
  cv_.notify_one();
}

Envelope Inbox::Pop(std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); })) {
    throw Error(ErrorCode::kTimeout, "no message within " +
                                         std::to_string(timeout.count()) +
                                         " ms");
  }
  Envelope env = std::move(queue_.front());
  queue_.pop_front();
  return env;
}

Digest256 SessionConfig::Digest() const {
  std::ostringstream os;
  os << "psu-session/v1;P=" << parties << ";group=" << group_preset
     << ";variant="
     << (variant == EncryptionMode::kOrdered ? "ordered" : "unordered")
     << ";lambda=" << match.lambda.ToString() << ";features=";
  for (const auto& f : match.features) {
    os << f.name << ':' << f.length << ':' << f.ngram << ',';
  }
  os << ";bloom=" << (bloom.enabled ? 1 : 0) << ':' << bloom.bits << ':'
     << bloom.hashes;
  return Sha3_256(os.str());
}

std::deque<Envelope> Handshake(Transport& transport, const Digest256& digest,
                               std::chrono::milliseconds timeout) {
  const int self = transport.self();
  const int parties = transport.parties();
  for (int peer = 0; peer < parties; ++peer) {
    if (peer == self) continue;
    ProtocolMessage hello;
    hello.type = MessageType::kHandshake;
    hello.origin = static_cast<uint16_t>(self);
    hello.payload.assign(digest.begin(), digest.end());
    transport.Send(peer, std::move(hello));
  }
  std::deque<Envelope> early;
  std::vector<bool> seen(parties, false);
  int pending = parties - 1;
  auto deadline = Clock::now() + timeout;
  while (pending > 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) {
      throw Error(ErrorCode::kTimeout,
                  std::to_string(pending) + " peer(s) never completed the "
                                            "handshake");
    }
    Envelope env = transport.Receive(left);
    if (env.msg.type == MessageType::kAbort) {
      throw Error(ErrorCode::kProtocolAbort,
                  "peer " + std::to_string(env.from) + " aborted: " +
                      std::string(env.msg.payload.begin(),
                                  env.msg.payload.end()));
    }
    if (env.msg.type != MessageType::kHandshake) {
      early.push_back(std::move(env));
      continue;
    }
    PSU_ENFORCE(env.from >= 0 && env.from < parties && !seen[env.from],
                ErrorCode::kPhaseViolation,
                "duplicate handshake from party " + std::to_string(env.from));
    seen[env.from] = true;
    --pending;
    if (!std::equal(digest.begin(), digest.end(), env.msg.payload.begin(),
                    env.msg.payload.end())) {
      std::string reason = "config digest mismatch";
      for (int peer = 0; peer < parties; ++peer) {
        if (peer == self) continue;
        ProtocolMessage abort;
        abort.type = MessageType::kAbort;
        abort.origin = static_cast<uint16_t>(self);
        abort.payload.assign(reason.begin(), reason.end());
        try {
          transport.Send(peer, std::move(abort));
        } catch (const Error&) {
        }
      }
      throw Error(ErrorCode::kConfigDigestMismatch,
                  "party " + std::to_string(env.from) +
                      " runs a different session configuration");
    }
  }
  return early;
}

// ---------------------------------------------------------------------------
// In-process backend

class InProcessNetwork::Endpoint : public Transport {
 public:
  Endpoint(InProcessNetwork* net, int self)
      : net_(net),
        self_(self),
        jitter_(Rng::FromSeed(net->options_.jitter_seed * 1000003u +
                              static_cast<uint64_t>(self))) {}

  int self() const override { return self_; }
  int parties() const override { return net_->parties(); }

  void Send(int to, ProtocolMessage msg) override {
    if (to < 0 || to >= parties()) {
      throw Error(ErrorCode::kPeerUnreachable,
                  "no party with id " + std::to_string(to));
    }
    if (net_->options_.max_jitter_us > 0) {
      auto us = jitter_.Uniform(net_->options_.max_jitter_us + 1);
      std::this_thread::sleep_for(std::chrono::microseconds(us));
    }
    {
      std::lock_guard<std::mutex> lock(count_mu_);
      sent_[msg.type] += 1;
    }
    if (net_->options_.tap) {
      std::lock_guard<std::mutex> lock(net_->tap_mu_);
      net_->options_.tap(self_, to, msg);
    }
    net_->inboxes_[to]->Push(Envelope{self_, std::move(msg)});
  }

  Envelope Receive(std::chrono::milliseconds timeout) override {
    return net_->inboxes_[self_]->Pop(timeout);
  }

  MessageCounts sent_counts() const override {
    std::lock_guard<std::mutex> lock(count_mu_);
    return sent_;
  }

 private:
  InProcessNetwork* net_;
  int self_;
  Rng jitter_;
  mutable std::mutex count_mu_;
  MessageCounts sent_;
};

InProcessNetwork::InProcessNetwork(int parties, InProcessOptions options)
    : options_(std::move(options)) {
  PSU_ENFORCE(parties >= 1, ErrorCode::kConfigError, "need at least 1 party");
  for (int k = 0; k < parties; ++k) {
    inboxes_.push_back(std::make_unique<Inbox>());
  }
  for (int k = 0; k < parties; ++k) {
    endpoints_.push_back(std::make_unique<Endpoint>(this, k));
  }
}

InProcessNetwork::~InProcessNetwork() = default;

Transport& InProcessNetwork::endpoint(int party) {
  PSU_ENFORCE(party >= 0 && party < parties(), ErrorCode::kPeerUnreachable,
              "no party with id " + std::to_string(party));
  return *endpoints_[party];
}

MessageCounts InProcessNetwork::total_counts() const {
  MessageCounts total;
  for (const auto& ep : endpoints_) total += ep->sent_counts();
  return total;
}

// ---------------------------------------------------------------------------
// TCP backend

struct TcpTransport::Peer {
  int fd = -1;
  std::mutex write_mu;
  std::thread reader;
};

TcpTransport::TcpTransport(int self, std::vector<std::string> addresses,
                           std::chrono::milliseconds connect_timeout)
    : self_(self), addresses_(std::move(addresses)) {
  const int parties = static_cast<int>(addresses_.size());
  PSU_ENFORCE(self_ >= 0 && self_ < parties, ErrorCode::kConfigError,
              "party id outside the address list");
  auto deadline = Clock::now() + connect_timeout;
  peers_.resize(parties);
  for (auto& p : peers_) p = std::make_unique<Peer>();

  auto cleanup = [&] {
    for (auto& p : peers_) {
      if (p->fd >= 0) ::close(p->fd);
      p->fd = -1;
    }
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
  };

  try {
    if (self_ < parties - 1) {
      sockaddr_in local = Resolve(addresses_[self_]);
      listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
      int one = 1;
      ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (listen_fd_ < 0 ||
          ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&local),
                 sizeof(local)) != 0 ||
          ::listen(listen_fd_, parties) != 0) {
        throw Error(ErrorCode::kPeerUnreachable,
                    "cannot listen on " + addresses_[self_] + ": " +
                        std::strerror(errno));
      }
    }

    for (int peer = 0; peer < self_; ++peer) {
      sockaddr_in remote = Resolve(addresses_[peer]);
      for (;;) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&remote),
                      sizeof(remote)) == 0) {
          std::vector<uint8_t> hello;
          PutU32(hello, kHelloMagic);
          PutU16(hello, static_cast<uint16_t>(self_));
          if (!WriteFull(fd, hello.data(), hello.size())) {
            ::close(fd);
            throw Error(ErrorCode::kPeerUnreachable,
                        "hello to party " + std::to_string(peer) + " failed");
          }
          SetNoDelay(fd);
          peers_[peer]->fd = fd;
          break;
        }
        ::close(fd);
        if (Clock::now() >= deadline) {
          throw Error(ErrorCode::kTimeout,
                      "party " + std::to_string(peer) + " at " +
                          addresses_[peer] + " never accepted");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    }

    for (int accepted = self_ + 1; accepted < parties; ++accepted) {
      if (!WaitReadable(listen_fd_, deadline)) {
        throw Error(ErrorCode::kTimeout,
                    "only " + std::to_string(accepted - self_ - 1) + " of " +
                        std::to_string(parties - self_ - 1) +
                        " higher-numbered peers connected");
      }
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        --accepted;
        continue;
      }
      uint8_t hello[6];
      if (!WaitReadable(fd, deadline) || !ReadFull(fd, hello, sizeof(hello))) {
        ::close(fd);
        --accepted;
        continue;
      }
      ByteReader in(hello);
      uint32_t magic = in.U32();
      uint16_t id = in.U16();
      if (magic != kHelloMagic || id <= self_ || id >= parties ||
          peers_[id]->fd >= 0) {
        ::close(fd);
        throw Error(ErrorCode::kFramingError, "bad hello from a peer");
      }
      SetNoDelay(fd);
      peers_[id]->fd = fd;
    }
  } catch (...) {
    cleanup();
    throw;
  }

  for (int peer = 0; peer < parties; ++peer) {
    if (peer == self_) continue;
    peers_[peer]->reader = std::thread([this, peer] { ReaderLoop(peer); });
  }
}

TcpTransport::~TcpTransport() {
  for (auto& p : peers_) {
    if (p->fd >= 0) ::shutdown(p->fd, SHUT_RDWR);
  }
  for (auto& p : peers_) {
    if (p->reader.joinable()) p->reader.join();
    if (p->fd >= 0) ::close(p->fd);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpTransport::ReaderLoop(int peer) {
  int fd = peers_[peer]->fd;
  for (;;) {
    uint8_t header[kFrameHeaderBytes];
    if (!ReadFull(fd, header, sizeof(header))) return;
    ByteReader in(header);
    uint32_t length = in.U32();
    uint8_t type = in.U8();
    if (length > kMaxPayloadBytes || type == 0 || type >= kMessageTypeCount) {
      std::string reason = "framing error on link from party " +
                           std::to_string(peer);
      ProtocolMessage abort;
      abort.type = MessageType::kAbort;
      abort.payload.assign(reason.begin(), reason.end());
      inbox_.Push(Envelope{peer, std::move(abort)});
      return;
    }
    ProtocolMessage msg;
    msg.type = static_cast<MessageType>(type);
    msg.origin = in.U16();
    msg.hop = in.U16();
    msg.payload.resize(length);
    if (length > 0 && !ReadFull(fd, msg.payload.data(), length)) return;
    inbox_.Push(Envelope{peer, std::move(msg)});
  }
}

void TcpTransport::Send(int to, ProtocolMessage msg) {
  if (to < 0 || to >= parties()) {
    throw Error(ErrorCode::kPeerUnreachable,
                "no party with id " + std::to_string(to));
  }
  {
    std::lock_guard<std::mutex> lock(count_mu_);
    sent_[msg.type] += 1;
  }
  if (to == self_) {
    inbox_.Push(Envelope{self_, std::move(msg)});
    return;
  }
  auto frame = EncodeFrame(msg);
  Peer& peer = *peers_[to];
  std::lock_guard<std::mutex> lock(peer.write_mu);
  if (peer.fd < 0 || !WriteFull(peer.fd, frame.data(), frame.size())) {
    throw Error(ErrorCode::kPeerUnreachable,
                "write to party " + std::to_string(to) + " failed");
  }
}

Envelope TcpTransport::Receive(std::chrono::milliseconds timeout) {
  return inbox_.Pop(timeout);
}

MessageCounts TcpTransport::sent_counts() const {
  std::lock_guard<std::mutex> lock(count_mu_);
  return sent_;
}

}  // namespace psu
