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

#ifndef DPFLOW_ENGINE_RANDOM_H_
#define DPFLOW_ENGINE_RANDOM_H_

#include <cstdint>

namespace dpflow::engine {

// Counter-based generator: the i-th draw is a pure function of (key, i), so a
// stream can be regenerated anywhere without shared state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t Bits(std::uint64_t counter) const;

  // Uniform in [0, 1) with 53 random bits.
  double Uniform01(std::uint64_t counter) const;

  // Uniform in [lo, hi).
  double Uniform(std::uint64_t counter, double lo, double hi) const;

  // Standard normal via Box-Muller on draws (2c, 2c+1).
  double Normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

std::uint64_t Mix64(std::uint64_t x);

}  // namespace dpflow::engine

#endif  // DPFLOW_ENGINE_RANDOM_H_
