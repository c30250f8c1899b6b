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

#include "dpflow/comm/spawn.h"

#include <memory>
#include <mutex>
#include <thread>

#include "dpflow/comm/inproc.h"
#include "dpflow/comm/socket.h"

namespace dpflow::comm {

const char* TransportKindName(TransportKind kind) {
  return kind == TransportKind::kInproc ? "inproc" : "socket";
}

TransportKind ParseTransportKind(const std::string& name) {
  if (name == "inproc") return TransportKind::kInproc;
  if (name == "socket") return TransportKind::kSocket;
  throw Error("unknown transport '" + name + "' (expected inproc or socket)");
}

void RunWorld(int p, const WorldOptions& options, const std::function<void(CommWorld&)>& body) {
  if (p < 1) throw Error("world size must be at least 1, got " + std::to_string(p));

  std::mutex mu;
  std::vector<Transport*> live(p, nullptr);
  bool aborted = false;
  int failed_rank = -1;
  std::string failure;

  std::shared_ptr<InprocFabric> fabric;
  std::optional<Listener> listener;
  Endpoint rendezvous;
  if (options.transport == TransportKind::kInproc) {
    fabric = std::make_shared<InprocFabric>(p, options.timeout);
  } else {
    rendezvous = Endpoint::Parse(options.rendezvous);
    if (p > 1) {
      listener.emplace(Listener::Bind(rendezvous));
      rendezvous.port = listener->port();
    }
  }

  auto rank_main = [&](int r) {
    std::unique_ptr<CommWorld> world;
    try {
      std::unique_ptr<Transport> transport;
      if (fabric) {
        transport = std::make_unique<InprocTransport>(fabric, r);
      } else {
        transport = SocketTransport::Create(r, p, rendezvous, options.timeout,
                                            r == 0 && listener ? &*listener : nullptr);
      }
      world = std::make_unique<CommWorld>(std::move(transport));
      {
        std::lock_guard lock(mu);
        live[r] = &world->transport();
        if (aborted) world->transport().Abort("another rank failed");
      }
      body(*world);
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      const bool secondary = dynamic_cast<const WorldAborted*>(&e) != nullptr;
      if (failed_rank < 0 && !secondary) {
        failed_rank = r;
        failure = e.what();
      }
      if (!aborted) {
        aborted = true;
        if (fabric) fabric->Abort("rank " + std::to_string(r) + " failed");
        for (Transport* t : live) {
          if (t) t->Abort("rank " + std::to_string(r) + " failed");
        }
      }
    }
    {
      std::lock_guard lock(mu);
      live[r] = nullptr;
    }
    world.reset();
  };

  std::vector<std::thread> threads;
  threads.reserve(p);
  for (int r = 0; r < p; ++r) threads.emplace_back(rank_main, r);
  for (auto& t : threads) t.join();

  if (failed_rank >= 0) throw RankFailure(failed_rank, failure);
  if (aborted) throw RankFailure(0, "world aborted");
}

}  // namespace dpflow::comm
