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

#include "dpflow/comm/wire.h"

#include <sstream>

#include "dpflow/error.h"

namespace dpflow::comm {

const char* WireTypeName(WireType t) {
  switch (t) {
    case WireType::kFloat64: return "f64";
    case WireType::kFloat32: return "f32";
    case WireType::kUInt8: return "u8";
  }
  return "?";
}

std::size_t WireTypeSize(WireType t) {
  switch (t) {
    case WireType::kFloat64: return 8;
    case WireType::kFloat32: return 4;
    case WireType::kUInt8: return 1;
  }
  return 0;
}

std::array<std::byte, kFrameHeaderSize> EncodeHeader(const FrameHeader& h) {
  std::array<std::byte, kFrameHeaderSize> out{};
  internal::StoreLE<std::uint32_t>(h.magic, out.data());
  internal::StoreLE<std::uint32_t>(h.tag, out.data() + 4);
  internal::StoreLE<std::uint32_t>(static_cast<std::uint32_t>(h.dtype), out.data() + 8);
  internal::StoreLE<std::uint64_t>(h.length, out.data() + 12);
  return out;
}

FrameHeader DecodeHeader(std::span<const std::byte, kFrameHeaderSize> bytes) {
  FrameHeader h;
  h.magic = internal::LoadLE<std::uint32_t>(bytes.data());
  if (h.magic != kWireMagic) {
    std::ostringstream os;
    os << "bad frame magic 0x" << std::hex << h.magic;
    throw ProtocolError(os.str());
  }
  h.tag = internal::LoadLE<std::uint32_t>(bytes.data() + 4);
  const auto dtype = internal::LoadLE<std::uint32_t>(bytes.data() + 8);
  if (dtype > 2) throw ProtocolError("unknown dtype code " + std::to_string(dtype));
  h.dtype = static_cast<WireType>(dtype);
  h.length = internal::LoadLE<std::uint64_t>(bytes.data() + 12);
  return h;
}

}  // namespace dpflow::comm
