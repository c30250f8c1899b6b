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

#ifndef DPFLOW_COMM_TRANSPORT_H_
#define DPFLOW_COMM_TRANSPORT_H_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dpflow/comm/wire.h"
#include "dpflow/error.h"

namespace dpflow::comm {

struct Message {
  std::uint32_t tag = 0;
  WireType dtype = WireType::kUInt8;
  std::vector<std::byte> payload;
};

// Raised in ranks that were blocked when another rank failed.
class WorldAborted : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// Point-to-point byte transport between the ranks of one world. Messages on
// each (src, dest, tag) channel arrive reliably and in FIFO order.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int size() const = 0;

  virtual void Send(int dest, Message msg) = 0;

  // Blocks until a message with `tag` from `src` arrives. Throws
  // ProtocolError on timeout or when `src` is gone, WorldAborted on abort.
  virtual Message Recv(int src, std::uint32_t tag) = 0;

  // Wakes every blocked Recv with WorldAborted. Safe to call from any thread.
  virtual void Abort(const std::string& reason) = 0;
};

// Per-rank inbound queues, one per source rank. Shared by the transports.
class Mailbox {
 public:
  Mailbox(int num_sources, std::chrono::milliseconds timeout);

  void Push(int src, Message msg);
  Message Pop(int src, std::uint32_t tag);

  // No more messages will arrive from `src`; queued ones stay readable.
  void CloseSource(int src, const std::string& reason);
  void Abort(const std::string& reason);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::deque<Message>> queues_;
  std::vector<std::optional<std::string>> closed_;
  std::optional<std::string> aborted_;
  std::chrono::milliseconds timeout_;
};

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_TRANSPORT_H_
