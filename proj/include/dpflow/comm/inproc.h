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

#ifndef DPFLOW_COMM_INPROC_H_
#define DPFLOW_COMM_INPROC_H_

#include <chrono>
#include <memory>
#include <vector>

#include "dpflow/comm/transport.h"

namespace dpflow::comm {

// All ranks of a world inside one process, each with a private mailbox.
class InprocFabric {
 public:
  InprocFabric(int size, std::chrono::milliseconds timeout);

  int size() const { return static_cast<int>(mailboxes_.size()); }
  Mailbox& mailbox(int rank) { return *mailboxes_.at(rank); }
  void Abort(const std::string& reason);

 private:
  std::vector<std::unique_ptr<Mailbox>> mailboxes_;
};

class InprocTransport : public Transport {
 public:
  InprocTransport(std::shared_ptr<InprocFabric> fabric, int rank);

  int rank() const override { return rank_; }
  int size() const override { return fabric_->size(); }
  void Send(int dest, Message msg) override;
  Message Recv(int src, std::uint32_t tag) override;
  void Abort(const std::string& reason) override;

 private:
  std::shared_ptr<InprocFabric> fabric_;
  int rank_;
};

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_INPROC_H_
