/* Copyright 2026 The dpflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dpflow/comm/socket.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <sstream>

namespace dpflow::comm {

namespace {

constexpr std::uint32_t kHelloTag = MakeTag(TagKind::kControl, 1);
constexpr std::uint32_t kTableTag = MakeTag(TagKind::kControl, 2);
constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 36;

using Clock = std::chrono::steady_clock;

std::string Errno(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

std::chrono::milliseconds Remaining(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() > 0 ? left : std::chrono::milliseconds(0);
}

void SendAll(int fd, const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    ssize_t k = ::send(fd, p, n, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(Errno("send"));
    }
    p += k;
    n -= static_cast<std::size_t>(k);
  }
}

// Returns the number of bytes read before EOF.
std::size_t RecvAll(int fd, void* data, std::size_t n) {
  char* p = static_cast<char*>(data);
  std::size_t got = 0;
  while (got < n) {
    ssize_t k = ::recv(fd, p + got, n - got, 0);
    if (k == 0) break;
    if (k < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw ProtocolError("socket receive timed out");
      throw ProtocolError(Errno("recv"));
    }
    got += static_cast<std::size_t>(k);
  }
  return got;
}

void SetReceiveTimeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

void SetNoDelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

struct AddrInfoDeleter {
  void operator()(addrinfo* ai) const { ::freeaddrinfo(ai); }
};
using AddrInfoPtr = std::unique_ptr<addrinfo, AddrInfoDeleter>;

AddrInfoPtr Resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) {
    throw ProtocolError("cannot resolve " + ep.ToString() + ": " + ::gai_strerror(rc));
  }
  return AddrInfoPtr(res);
}

int ConnectWithRetry(const Endpoint& ep, Clock::time_point deadline) {
  AddrInfoPtr ai = Resolve(ep, false);
  while (true) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) throw ProtocolError(Errno("socket"));
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      SetNoDelay(fd);
      return fd;
    }
    const int err = errno;
    ::close(fd);
    if (err != ECONNREFUSED && err != EINTR && err != ETIMEDOUT) {
      errno = err;
      throw ProtocolError(Errno(("connect to " + ep.ToString()).c_str()));
    }
    if (Clock::now() >= deadline) {
      throw ProtocolError("timed out connecting to " + ep.ToString());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

Message HelloMessage(int rank, std::uint16_t port) {
  Message m;
  m.tag = kHelloTag;
  m.dtype = WireType::kUInt8;
  m.payload.resize(8);
  internal::StoreLE<std::uint32_t>(static_cast<std::uint32_t>(rank), m.payload.data());
  internal::StoreLE<std::uint32_t>(port, m.payload.data() + 4);
  return m;
}

std::pair<int, std::uint16_t> ReadHello(int fd) {
  Message m;
  if (!ReadFrame(fd, m) || m.tag != kHelloTag || m.payload.size() != 8) {
    throw ProtocolError("malformed rendezvous hello");
  }
  return {static_cast<int>(internal::LoadLE<std::uint32_t>(m.payload.data())),
          static_cast<std::uint16_t>(internal::LoadLE<std::uint32_t>(m.payload.data() + 4))};
}

std::string PeerHost(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getpeername(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) return "127.0.0.1";
  char buf[INET_ADDRSTRLEN];
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof buf);
  return buf;
}

}  // namespace

Endpoint Endpoint::Parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error("endpoint must look like host:port, got '" + std::string(text) + "'");
  }
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  const std::string_view port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw Error("bad port in endpoint '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

std::string Endpoint::ToString() const { return host + ":" + std::to_string(port); }

Listener Listener::Bind(const Endpoint& at) {
  AddrInfoPtr ai = Resolve(at, true);
  int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
  if (fd < 0) throw ProtocolError(Errno("socket"));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(fd, 128) != 0) {
    std::string msg = Errno(("bind/listen on " + at.ToString()).c_str());
    ::close(fd);
    throw ProtocolError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  return Listener(fd, ntohs(bound.sin_port));
}

Listener::Listener(Listener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

Listener& Listener::operator=(Listener&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    port_ = other.port_;
    other.fd_ = -1;
  }
  return *this;
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

int Listener::Accept(std::chrono::milliseconds timeout) {
  pollfd pfd{fd_, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  } while (rc < 0 && errno == EINTR);
  if (rc == 0) throw ProtocolError("timed out waiting for peers on port " + std::to_string(port_));
  if (rc < 0) throw ProtocolError(Errno("poll"));
  int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw ProtocolError(Errno("accept"));
  SetNoDelay(fd);
  return fd;
}

void WriteFrame(int fd, const Message& msg) {
  FrameHeader h;
  h.tag = msg.tag;
  h.dtype = msg.dtype;
  h.length = msg.payload.size();
  const auto header = EncodeHeader(h);
  SendAll(fd, header.data(), header.size());
  if (!msg.payload.empty()) SendAll(fd, msg.payload.data(), msg.payload.size());
}

bool ReadFrame(int fd, Message& msg) {
  std::array<std::byte, kFrameHeaderSize> header;
  const std::size_t got = RecvAll(fd, header.data(), header.size());
  if (got == 0) return false;
  if (got < header.size()) throw ProtocolError("connection closed inside a frame header");
  const FrameHeader h = DecodeHeader(header);
  if (h.length > kMaxPayload) {
    throw ProtocolError("frame payload of " + std::to_string(h.length) + " bytes is too large");
  }
  msg.tag = h.tag;
  msg.dtype = h.dtype;
  msg.payload.resize(h.length);
  if (RecvAll(fd, msg.payload.data(), msg.payload.size()) != msg.payload.size()) {
    throw ProtocolError("connection closed inside a frame payload");
  }
  return true;
}

SocketTransport::SocketTransport(int rank, int size, std::chrono::milliseconds timeout)
    : rank_(rank), size_(size), timeout_(timeout), mailbox_(size, timeout) {
  for (int r = 0; r < size; ++r) peers_.push_back(std::make_unique<Peer>());
}

std::unique_ptr<SocketTransport> SocketTransport::Create(int rank, int size,
                                                         const Endpoint& rendezvous,
                                                         std::chrono::milliseconds timeout,
                                                         Listener* bound) {
  if (size < 1 || rank < 0 || rank >= size) {
    throw Error("invalid rank " + std::to_string(rank) + " for world of size " +
                std::to_string(size));
  }
  std::unique_ptr<SocketTransport> t(new SocketTransport(rank, size, timeout));
  if (size == 1) return t;
  const auto deadline = Clock::now() + timeout;

  auto adopt = [&](int peer, int fd) {
    if (peer < 0 || peer >= size || peer == rank || t->peers_[peer]->fd >= 0) {
      ::close(fd);
      throw ProtocolError("unexpected rendezvous from rank " + std::to_string(peer));
    }
    t->peers_[peer]->fd = fd;
  };

  if (rank == 0) {
    std::optional<Listener> own;
    Listener& listener = bound ? *bound : own.emplace(Listener::Bind(rendezvous));
    std::vector<std::string> table(size);
    for (int i = 1; i < size; ++i) {
      int fd = listener.Accept(Remaining(deadline));
      SetReceiveTimeout(fd, timeout);
      int peer = -1;
      std::uint16_t port = 0;
      try {
        std::tie(peer, port) = ReadHello(fd);
      } catch (...) {
        ::close(fd);
        throw;
      }
      adopt(peer, fd);
      table[peer] = PeerHost(fd) + ":" + std::to_string(port);
    }
    std::string text;
    for (int r = 1; r < size; ++r) text += table[r] + "\n";
    Message m;
    m.tag = kTableTag;
    m.payload.resize(text.size());
    std::memcpy(m.payload.data(), text.data(), text.size());
    for (int r = 1; r < size; ++r) WriteFrame(t->peers_[r]->fd, m);
  } else {
    Listener mine = Listener::Bind(Endpoint{"0.0.0.0", 0});
    int fd0 = ConnectWithRetry(rendezvous, deadline);
    SetReceiveTimeout(fd0, timeout);
    adopt(0, fd0);
    WriteFrame(fd0, HelloMessage(rank, mine.port()));
    Message table;
    if (!ReadFrame(fd0, table) || table.tag != kTableTag) {
      throw ProtocolError("rank 0 did not send the address table");
    }
    std::vector<Endpoint> peers(1);
    std::istringstream lines(std::string(reinterpret_cast<const char*>(table.payload.data()),
                                         table.payload.size()));
    for (std::string line; std::getline(lines, line);) peers.push_back(Endpoint::Parse(line));
    if (static_cast<int>(peers.size()) != size) {
      throw ProtocolError("address table lists " + std::to_string(peers.size()) +
                          " ranks, expected " + std::to_string(size));
    }
    for (int j = 1; j < rank; ++j) {
      int fd = ConnectWithRetry(peers[j], deadline);
      adopt(j, fd);
      WriteFrame(fd, HelloMessage(rank, 0));
    }
    for (int k = rank + 1; k < size; ++k) {
      int fd = mine.Accept(Remaining(deadline));
      SetReceiveTimeout(fd, timeout);
      int peer = -1;
      try {
        peer = ReadHello(fd).first;
      } catch (...) {
        ::close(fd);
        throw;
      }
      adopt(peer, fd);
    }
  }
  t->StartReaders();
  return t;
}

void SocketTransport::StartReaders() {
  for (int r = 0; r < size_; ++r) {
    Peer& p = *peers_[r];
    if (p.fd < 0) continue;
    SetReceiveTimeout(p.fd, std::chrono::milliseconds(0));
    p.reader = std::thread([this, r] { ReaderLoop(r); });
  }
}

void SocketTransport::ReaderLoop(int src) {
  const int fd = peers_[src]->fd;
  try {
    while (true) {
      Message m;
      if (!ReadFrame(fd, m)) {
        mailbox_.CloseSource(src, "connection closed");
        break;
      }
      mailbox_.Push(src, std::move(m));
    }
  } catch (const std::exception& e) {
    mailbox_.CloseSource(src, e.what());
  }
  {
    std::lock_guard lock(readers_mu_);
    ++readers_done_;
  }
  readers_cv_.notify_all();
}

SocketTransport::~SocketTransport() {
  // Half-close so peers drain everything we sent, then wait for their EOF.
  int readers = 0;
  for (auto& p : peers_) {
    if (p->fd >= 0) ::shutdown(p->fd, aborted_ ? SHUT_RDWR : SHUT_WR);
    if (p->reader.joinable()) ++readers;
  }
  {
    std::unique_lock lock(readers_mu_);
    if (!readers_cv_.wait_for(lock, timeout_, [&] { return readers_done_ == readers; })) {
      for (auto& p : peers_) {
        if (p->fd >= 0) ::shutdown(p->fd, SHUT_RDWR);
      }
    }
  }
  for (auto& p : peers_) {
    if (p->reader.joinable()) p->reader.join();
    if (p->fd >= 0) ::close(p->fd);
  }
}

void SocketTransport::Send(int dest, Message msg) {
  if (dest < 0 || dest >= size_) {
    throw ProtocolError("send to rank " + std::to_string(dest) + " outside world of size " +
                        std::to_string(size_));
  }
  if (aborted_) throw WorldAborted("world aborted");
  if (dest == rank_) {
    mailbox_.Push(rank_, std::move(msg));
    return;
  }
  Peer& p = *peers_[dest];
  std::lock_guard lock(p.send_mu);
  WriteFrame(p.fd, msg);
}

Message SocketTransport::Recv(int src, std::uint32_t tag) {
  if (src < 0 || src >= size_) {
    throw ProtocolError("recv from rank " + std::to_string(src) + " outside world of size " +
                        std::to_string(size_));
  }
  return mailbox_.Pop(src, tag);
}

void SocketTransport::Abort(const std::string& reason) {
  aborted_ = true;
  mailbox_.Abort(reason);
  for (auto& p : peers_) {
    if (p->fd >= 0) ::shutdown(p->fd, SHUT_RDWR);
  }
}

}  // namespace dpflow::comm
