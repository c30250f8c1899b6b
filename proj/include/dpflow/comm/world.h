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

#ifndef DPFLOW_COMM_WORLD_H_
#define DPFLOW_COMM_WORLD_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dpflow/comm/transport.h"
#include "dpflow/comm/wire.h"

namespace dpflow::comm {

// Counts point-to-point messages and payload bytes (frame headers excluded).
struct TrafficStats {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
};

struct CollectiveRecord {
  TagKind kind = TagKind::kPointToPoint;
  std::uint32_t key = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
};

// One rank's handle on a world. Confined to the rank's thread.
class CommWorld {
 public:
  explicit CommWorld(std::unique_ptr<Transport> transport);

  int rank() const { return transport_->rank(); }
  int size() const { return transport_->size(); }
  Transport& transport() { return *transport_; }

  void Send(int dest, std::uint32_t tag, WireType dtype, std::vector<std::byte> payload);
  Message Recv(int src, std::uint32_t tag);

  template <WireElement T>
  void SendArray(int dest, std::uint32_t tag, std::span<const T> values) {
    Send(dest, tag, WireTypeOf<T>(), EncodePayload(values));
  }

  // Receives exactly out.size() elements of type T; anything else is a
  // ProtocolError naming the peer.
  template <WireElement T>
  void RecvArray(int src, std::uint32_t tag, std::span<T> out) {
    Message msg = Recv(src, tag);
    CheckArray(msg, src, WireTypeOf<T>(), out.size());
    DecodePayload<T>(msg.payload, out);
  }

  TrafficStats stats() const { return stats_; }

  // Sequence number for collectives issued without an explicit key.
  std::uint32_t NextCollectiveKey() { return next_key_++ & kTagKeyMask; }

  void RecordCollective(const CollectiveRecord& record) { log_.push_back(record); }
  const std::vector<CollectiveRecord>& collective_log() const { return log_; }
  void ClearCollectiveLog() { log_.clear(); }

 private:
  void CheckArray(const Message& msg, int src, WireType expected, std::size_t count) const;

  std::unique_ptr<Transport> transport_;
  TrafficStats stats_;
  std::uint32_t next_key_ = 0;
  std::vector<CollectiveRecord> log_;
};

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_WORLD_H_
