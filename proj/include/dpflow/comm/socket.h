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

#ifndef DPFLOW_COMM_SOCKET_H_
#define DPFLOW_COMM_SOCKET_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dpflow/comm/transport.h"

namespace dpflow::comm {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port"
  static Endpoint Parse(std::string_view text);
  std::string ToString() const;
};

// Owned listening socket.
class Listener {
 public:
  static Listener Bind(const Endpoint& at);

  Listener(Listener&& other) noexcept;
  Listener& operator=(Listener&& other) noexcept;
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  std::uint16_t port() const { return port_; }

  // Returns a connected descriptor, or throws ProtocolError on timeout.
  int Accept(std::chrono::milliseconds timeout);

 private:
  Listener(int fd, std::uint16_t port) : fd_(fd), port_(port) {}
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Full mesh of TCP connections. Rank 0 accepts on the rendezvous address;
// ranks 1..p-1 connect to it and announce their rank and listening port.
// Rank 0 answers with the address table, then every rank i >= 1 connects to
// ranks 1..i-1 and accepts from ranks i+1..p-1.
class SocketTransport : public Transport {
 public:
  // `bound` lets rank 0 use a listener created earlier (e.g. on port 0).
  static std::unique_ptr<SocketTransport> Create(int rank, int size, const Endpoint& rendezvous,
                                                 std::chrono::milliseconds timeout,
                                                 Listener* bound = nullptr);
  ~SocketTransport() override;

  int rank() const override { return rank_; }
  int size() const override { return size_; }
  void Send(int dest, Message msg) override;
  Message Recv(int src, std::uint32_t tag) override;
  void Abort(const std::string& reason) override;

 private:
  struct Peer {
    int fd = -1;
    std::mutex send_mu;
    std::thread reader;
  };

  SocketTransport(int rank, int size, std::chrono::milliseconds timeout);
  void StartReaders();
  void ReaderLoop(int src);

  int rank_;
  int size_;
  std::chrono::milliseconds timeout_;
  Mailbox mailbox_;
  std::vector<std::unique_ptr<Peer>> peers_;
  std::atomic<bool> aborted_{false};
  std::mutex readers_mu_;
  std::condition_variable readers_cv_;
  int readers_done_ = 0;
};

// Blocking frame I/O on a connected descriptor.
void WriteFrame(int fd, const Message& msg);
// Returns false on clean EOF before the first header byte.
bool ReadFrame(int fd, Message& msg);

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_SOCKET_H_
