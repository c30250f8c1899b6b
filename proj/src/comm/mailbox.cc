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

#include <cstdio>

#include "dpflow/comm/transport.h"

namespace dpflow::comm {

namespace {

std::string HexTag(std::uint32_t tag) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", tag);
  return buf;
}

}  // namespace

Mailbox::Mailbox(int num_sources, std::chrono::milliseconds timeout)
    : queues_(num_sources), closed_(num_sources), timeout_(timeout) {}

void Mailbox::Push(int src, Message msg) {
  {
    std::lock_guard lock(mu_);
    queues_.at(src).push_back(std::move(msg));
  }
  cv_.notify_all();
}

Message Mailbox::Pop(int src, std::uint32_t tag) {
  std::unique_lock lock(mu_);
  auto& q = queues_.at(src);
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    for (auto it = q.begin(); it != q.end(); ++it) {
      if (it->tag == tag) {
        Message msg = std::move(*it);
        q.erase(it);
        return msg;
      }
    }
    if (aborted_) throw WorldAborted("world aborted: " + *aborted_);
    if (closed_[src]) {
      throw ProtocolError("rank " + std::to_string(src) + " is gone: " + *closed_[src]);
    }
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      bool found = false;
      for (const Message& m : q) found = found || m.tag == tag;
      if (!found) {
        throw ProtocolError("timed out waiting for tag " + HexTag(tag) + " from rank " +
                            std::to_string(src));
      }
    }
  }
}

void Mailbox::CloseSource(int src, const std::string& reason) {
  {
    std::lock_guard lock(mu_);
    if (!closed_.at(src)) closed_[src] = reason;
  }
  cv_.notify_all();
}

void Mailbox::Abort(const std::string& reason) {
  {
    std::lock_guard lock(mu_);
    if (!aborted_) aborted_ = reason;
  }
  cv_.notify_all();
}

}  // namespace dpflow::comm
