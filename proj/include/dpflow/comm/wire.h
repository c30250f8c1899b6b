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

#ifndef DPFLOW_COMM_WIRE_H_
#define DPFLOW_COMM_WIRE_H_

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <type_traits>
#include <vector>

namespace dpflow::comm {

// Frame layout on stream transports, all fields little-endian:
//   u32 magic | u32 tag | u32 dtype | u64 payload length | payload
inline constexpr std::uint32_t kWireMagic = 0x4D544658;
inline constexpr std::size_t kFrameHeaderSize = 20;

enum class WireType : std::uint32_t { kFloat64 = 0, kFloat32 = 1, kUInt8 = 2 };

const char* WireTypeName(WireType t);
std::size_t WireTypeSize(WireType t);

template <typename T>
concept WireElement =
    std::is_same_v<T, double> || std::is_same_v<T, float> || std::is_same_v<T, std::uint8_t>;

template <WireElement T>
constexpr WireType WireTypeOf() {
  if constexpr (std::is_same_v<T, double>) {
    return WireType::kFloat64;
  } else if constexpr (std::is_same_v<T, float>) {
    return WireType::kFloat32;
  } else {
    return WireType::kUInt8;
  }
}

struct FrameHeader {
  std::uint32_t magic = kWireMagic;
  std::uint32_t tag = 0;
  WireType dtype = WireType::kUInt8;
  std::uint64_t length = 0;
};

std::array<std::byte, kFrameHeaderSize> EncodeHeader(const FrameHeader& h);

// Throws ProtocolError on a bad magic or unknown dtype code.
FrameHeader DecodeHeader(std::span<const std::byte, kFrameHeaderSize> bytes);

namespace internal {

template <typename U>
void StoreLE(U v, std::byte* out) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

template <typename U>
U LoadLE(const std::byte* in) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(std::to_integer<U>(in[i])) << (8 * i);
  return v;
}

template <typename T>
using BitsOf = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;

}  // namespace internal

// Raw little-endian element bytes.
template <WireElement T>
std::vector<std::byte> EncodePayload(std::span<const T> values) {
  std::vector<std::byte> out(values.size() * sizeof(T));
  if constexpr (std::endian::native == std::endian::little) {
    if (!values.empty()) std::memcpy(out.data(), values.data(), out.size());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      internal::StoreLE(std::bit_cast<internal::BitsOf<T>>(values[i]), out.data() + i * sizeof(T));
    }
  }
  return out;
}

template <WireElement T>
void DecodePayload(std::span<const std::byte> bytes, std::span<T> out) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!out.empty()) std::memcpy(out.data(), bytes.data(), out.size() * sizeof(T));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = std::bit_cast<T>(internal::LoadLE<internal::BitsOf<T>>(bytes.data() + i * sizeof(T)));
    }
  }
}

// Tags carry the collective kind in the top four bits and a caller-chosen key
// (for example a variable id) in the low 28 bits.
enum class TagKind : std::uint32_t {
  kPointToPoint = 0,
  kBroadcast = 1,
  kAllreduce = 2,
  kBarrier = 3,
  kControl = 15,
};

inline constexpr std::uint32_t kTagKeyMask = 0x0FFFFFFF;

constexpr std::uint32_t MakeTag(TagKind kind, std::uint32_t key) {
  return (static_cast<std::uint32_t>(kind) << 28) | (key & kTagKeyMask);
}
constexpr TagKind TagKindOf(std::uint32_t tag) { return static_cast<TagKind>(tag >> 28); }
constexpr std::uint32_t TagKeyOf(std::uint32_t tag) { return tag & kTagKeyMask; }

}  // namespace dpflow::comm

#endif  // DPFLOW_COMM_WIRE_H_
