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

#ifndef DPFLOW_DATASETS_PARTITION_H_
#define DPFLOW_DATASETS_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dpflow::datasets {

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// Contiguous balanced partition of [0, n): the first n mod p ranks get one
// extra element.
IndexRange Shard(std::size_t n, std::size_t rank, std::size_t p);

// One rank's part of the global batch of a training step. The global batch of
// step s is the B positions starting at s*B, wrapping cyclically over the
// dataset; `window` is this rank's balanced share of those B positions.
struct BatchSlice {
  std::size_t step = 0;
  std::size_t n = 0;
  std::size_t batch = 0;
  IndexRange window;  // offsets within the global batch

  std::size_t size() const { return window.size(); }
  std::size_t window_start() const { return (step * batch) % n; }
  // Position in the infinite sample stream of the j-th element.
  std::uint64_t stream_position(std::size_t j) const {
    return static_cast<std::uint64_t>(step) * batch + window.begin + j;
  }
  // Dataset index of the j-th element (unshuffled).
  std::size_t index(std::size_t j) const { return (window_start() + window.begin + j) % n; }
  std::vector<std::size_t> indices() const;
};

BatchSlice MakeBatchSlice(std::size_t n, std::size_t batch, std::size_t step, std::size_t rank,
                          std::size_t p);

// Optional seeded reshuffle per epoch. Epoch e of the sample stream visits the
// dataset in the order of a Fisher-Yates permutation keyed by (seed, e).
class EpochShuffle {
 public:
  EpochShuffle(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {}

  std::size_t sample(std::uint64_t stream_position);
  std::vector<std::size_t> indices(const BatchSlice& slice);

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t cached_epoch_ = ~std::uint64_t{0};
  std::vector<std::size_t> perm_;
};

std::vector<std::size_t> EpochPermutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

}  // namespace dpflow::datasets

#endif  // DPFLOW_DATASETS_PARTITION_H_
