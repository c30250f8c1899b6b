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

#include "dpflow/comm/inproc.h"

#include <string>

namespace dpflow::comm {

InprocFabric::InprocFabric(int size, std::chrono::milliseconds timeout) {
  mailboxes_.reserve(size);
  for (int r = 0; r < size; ++r) mailboxes_.push_back(std::make_unique<Mailbox>(size, timeout));
}

void InprocFabric::Abort(const std::string& reason) {
  for (auto& m : mailboxes_) m->Abort(reason);
}

InprocTransport::InprocTransport(std::shared_ptr<InprocFabric> fabric, int rank)
    : fabric_(std::move(fabric)), rank_(rank) {}

void InprocTransport::Send(int dest, Message msg) {
  if (dest < 0 || dest >= size()) {
    throw ProtocolError("send to rank " + std::to_string(dest) + " outside world of size " +
                        std::to_string(size()));
  }
  fabric_->mailbox(dest).Push(rank_, std::move(msg));
}

Message InprocTransport::Recv(int src, std::uint32_t tag) {
  if (src < 0 || src >= size()) {
    throw ProtocolError("recv from rank " + std::to_string(src) + " outside world of size " +
                        std::to_string(size()));
  }
  return fabric_->mailbox(rank_).Pop(src, tag);
}

void InprocTransport::Abort(const std::string& reason) { fabric_->Abort(reason); }

}  // namespace dpflow::comm
