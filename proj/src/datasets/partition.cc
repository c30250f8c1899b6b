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

#include "dpflow/datasets/partition.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "dpflow/engine/random.h"
#include "dpflow/error.h"

namespace dpflow::datasets {

IndexRange Shard(std::size_t n, std::size_t rank, std::size_t p) {
  if (p == 0 || rank >= p) {
    throw Error("shard: rank " + std::to_string(rank) + " outside world of size " + std::to_string(p));
  }
  const std::size_t base = n / p;
  const std::size_t extra = n % p;
  const std::size_t begin = rank * base + std::min(rank, extra);
  return {begin, begin + base + (rank < extra ? 1 : 0)};
}

std::vector<std::size_t> BatchSlice::indices() const {
  std::vector<std::size_t> out(size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = index(j);
  return out;
}

BatchSlice MakeBatchSlice(std::size_t n, std::size_t batch, std::size_t step, std::size_t rank,
                          std::size_t p) {
  if (batch == 0) throw Error("batch size must be at least 1");
  if (n == 0) throw Error("cannot slice an empty dataset");
  return BatchSlice{step, n, batch, Shard(batch, rank, p)};
}

std::vector<std::size_t> EpochPermutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const engine::CounterRng rng(seed, epoch);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.Bits(i) % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::size_t EpochShuffle::sample(std::uint64_t stream_position) {
  const std::uint64_t epoch = stream_position / n_;
  if (epoch != cached_epoch_) {
    perm_ = EpochPermutation(n_, seed_, epoch);
    cached_epoch_ = epoch;
  }
  return perm_[stream_position % n_];
}

std::vector<std::size_t> EpochShuffle::indices(const BatchSlice& slice) {
  std::vector<std::size_t> out(slice.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = sample(slice.stream_position(j));
  return out;
}

}  // namespace dpflow::datasets
