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

#include "dpflow/comm/world.h"

namespace dpflow::comm {

CommWorld::CommWorld(std::unique_ptr<Transport> transport) : transport_(std::move(transport)) {}

void CommWorld::Send(int dest, std::uint32_t tag, WireType dtype, std::vector<std::byte> payload) {
  const std::uint64_t bytes = payload.size();
  transport_->Send(dest, Message{tag, dtype, std::move(payload)});
  ++stats_.messages_sent;
  stats_.bytes_sent += bytes;
}

Message CommWorld::Recv(int src, std::uint32_t tag) { return transport_->Recv(src, tag); }

void CommWorld::CheckArray(const Message& msg, int src, WireType expected,
                           std::size_t count) const {
  if (msg.dtype != expected) {
    throw ProtocolError(std::string("rank ") + std::to_string(rank()) + ": expected " +
                        WireTypeName(expected) + " payload from rank " + std::to_string(src) +
                        ", got " + WireTypeName(msg.dtype));
  }
  const std::size_t want = count * WireTypeSize(expected);
  if (msg.payload.size() != want) {
    throw ProtocolError("rank " + std::to_string(rank()) + ": expected " + std::to_string(count) +
                        " elements from rank " + std::to_string(src) + ", got " +
                        std::to_string(msg.payload.size() / WireTypeSize(expected)));
  }
}

}  // namespace dpflow::comm
