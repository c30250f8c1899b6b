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

#ifndef DPFLOW_COMM_COLLECTIVES_H_
#define DPFLOW_COMM_COLLECTIVES_H_

#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>

#include "dpflow/comm/wire.h"
#include "dpflow/comm/world.h"

namespace dpflow::comm {

// Passing kAutoKey tags the collective with the world's next sequence number.
inline constexpr std::uint32_t kAutoKey = std::numeric_limits<std::uint32_t>::max();

// Binomial-tree broadcast from `root`, in place. In round k, ranks with
// relative id below 2^k forward to relative id + 2^k: ceil(log2 p) rounds,
// p - 1 messages in total.
template <WireElement T>
void Broadcast(CommWorld& world, std::span<T> buffer, int root = 0, std::uint32_t key = kAutoKey);

// Element-wise sum over all ranks, in place, by recursive doubling. For
// non-power-of-two p the ranks above the largest power of two first fold
// into rank - 2^floor(log2 p) and get the result back at the end. In every
// pairwise combine the lower rank's operand is the left addend, so all ranks
// finish bitwise-identical and runs are reproducible.
template <typename T>
  requires std::is_floating_point_v<T>
void AllreduceSum(CommWorld& world, std::span<T> buffer, std::uint32_t key = kAutoKey);

// Zero-length allreduce.
void Barrier(CommWorld& world);

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_COLLECTIVES_H_
