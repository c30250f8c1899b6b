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

#ifndef DPFLOW_COMM_SPAWN_H_
#define DPFLOW_COMM_SPAWN_H_

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dpflow/comm/world.h"
#include "dpflow/error.h"

namespace dpflow::comm {

enum class TransportKind { kInproc, kSocket };

const char* TransportKindName(TransportKind kind);
TransportKind ParseTransportKind(const std::string& name);

struct WorldOptions {
  TransportKind transport = TransportKind::kInproc;
  // Socket transport only. Port 0 picks a free port.
  std::string rendezvous = "127.0.0.1:0";
  std::chrono::milliseconds timeout{std::chrono::minutes(2)};
};

// A rank's body threw; carries the first failing rank.
class RankFailure : public Error {
 public:
  RankFailure(int rank, const std::string& what)
      : Error("rank " + std::to_string(rank) + " failed: " + what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

// Runs `body` on p ranks concurrently, one thread per rank, and joins them.
// If any rank throws, the remaining ranks are aborted and RankFailure for the
// first failure is raised.
void RunWorld(int p, const WorldOptions& options, const std::function<void(CommWorld&)>& body);

// Like RunWorld, collecting each rank's return value in rank order.
template <typename Fn>
auto WorldSpawn(int p, Fn&& body, const WorldOptions& options = {}) {
  using R = std::invoke_result_t<Fn&, CommWorld&>;
  if constexpr (std::is_void_v<R>) {
    RunWorld(p, options, [&](CommWorld& w) { body(w); });
  } else {
    std::vector<std::optional<R>> slots(p > 0 ? p : 0);
    RunWorld(p, options, [&](CommWorld& w) { slots[w.rank()].emplace(body(w)); });
    std::vector<R> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  }
}

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_SPAWN_H_
