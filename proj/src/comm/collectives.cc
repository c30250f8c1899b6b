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

#include "dpflow/comm/collectives.h"

#include <bit>
#include <vector>

namespace dpflow::comm {

namespace {

class CollectiveScope {
 public:
  CollectiveScope(CommWorld& world, TagKind kind, std::uint32_t key)
      : world_(world), start_(world.stats()), record_{kind, key, 0, 0} {}
  ~CollectiveScope() {
    const TrafficStats now = world_.stats();
    record_.messages_sent = now.messages_sent - start_.messages_sent;
    record_.bytes_sent = now.bytes_sent - start_.bytes_sent;
    world_.RecordCollective(record_);
  }

 private:
  CommWorld& world_;
  TrafficStats start_;
  CollectiveRecord record_;
};

std::uint32_t ResolveKey(CommWorld& world, std::uint32_t key) {
  return key == kAutoKey ? world.NextCollectiveKey() : (key & kTagKeyMask);
}

template <typename T>
void AllreduceImpl(CommWorld& world, std::span<T> buffer, TagKind kind, std::uint32_t key) {
  key = ResolveKey(world, key);
  CollectiveScope scope(world, kind, key);
  const int p = world.size();
  const int rank = world.rank();
  if (p == 1) return;
  const std::uint32_t tag = MakeTag(kind, key);
  const int core = static_cast<int>(std::bit_floor(static_cast<unsigned>(p)));
  const int excess = p - core;
  std::span<const T> mine(buffer.data(), buffer.size());
  std::vector<T> other(buffer.size());

  if (rank >= core) {
    world.SendArray<T>(rank - core, tag, mine);
    world.RecvArray<T>(rank - core, tag, buffer);
    return;
  }
  if (rank < excess) {
    world.RecvArray<T>(rank + core, tag, std::span<T>(other));
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = buffer[i] + other[i];
  }
  for (int mask = 1; mask < core; mask <<= 1) {
    const int partner = rank ^ mask;
    world.SendArray<T>(partner, tag, mine);
    world.RecvArray<T>(partner, tag, std::span<T>(other));
    if (partner < rank) {
      for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = other[i] + buffer[i];
    } else {
      for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = buffer[i] + other[i];
    }
  }
  if (rank < excess) world.SendArray<T>(rank + core, tag, mine);
}

}  // namespace

template <WireElement T>
void Broadcast(CommWorld& world, std::span<T> buffer, int root, std::uint32_t key) {
  key = ResolveKey(world, key);
  CollectiveScope scope(world, TagKind::kBroadcast, key);
  const int p = world.size();
  const int rel = (world.rank() - root + p) % p;
  const std::uint32_t tag = MakeTag(TagKind::kBroadcast, key);
  for (int mask = 1; mask < p; mask <<= 1) {
    if (rel < mask) {
      if (rel + mask < p) {
        world.SendArray<T>((rel + mask + root) % p, tag,
                           std::span<const T>(buffer.data(), buffer.size()));
      }
    } else if (rel < 2 * mask) {
      world.RecvArray<T>((rel - mask + root) % p, tag, buffer);
    }
  }
}

template <typename T>
  requires std::is_floating_point_v<T>
void AllreduceSum(CommWorld& world, std::span<T> buffer, std::uint32_t key) {
  AllreduceImpl(world, buffer, TagKind::kAllreduce, key);
}

void Barrier(CommWorld& world) {
  AllreduceImpl(world, std::span<double>(), TagKind::kBarrier, kAutoKey);
}

template void Broadcast<double>(CommWorld&, std::span<double>, int, std::uint32_t);
template void Broadcast<float>(CommWorld&, std::span<float>, int, std::uint32_t);
template void Broadcast<std::uint8_t>(CommWorld&, std::span<std::uint8_t>, int, std::uint32_t);
template void AllreduceSum<double>(CommWorld&, std::span<double>, std::uint32_t);
template void AllreduceSum<float>(CommWorld&, std::span<float>, std::uint32_t);

}  // namespace dpflow::comm
