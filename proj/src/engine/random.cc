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

#include "dpflow/engine/random.h"

#include <cmath>
#include <numbers>

namespace dpflow::engine {

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(Mix64(Mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

std::uint64_t CounterRng::Bits(std::uint64_t counter) const {
  return Mix64(key_ ^ Mix64(counter));
}

double CounterRng::Uniform01(std::uint64_t counter) const {
  return static_cast<double>(Bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::Uniform(std::uint64_t counter, double lo, double hi) const {
  double v = lo + (hi - lo) * Uniform01(counter);
  // lo + (hi-lo)*u can round up to hi.
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

double CounterRng::Normal(std::uint64_t counter) const {
  double u1 = 1.0 - Uniform01(2 * counter);  // (0, 1]
  double u2 = Uniform01(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dpflow::engine
