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

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dpflow/datasets/dataset.h"
#include "dpflow/error.h"

namespace dpflow::datasets {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::string Hex(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

std::uint32_t ReadBE32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* file) {
  if (bytes.size() < offset + 4) {
    throw FormatError(std::string(file) + ": truncated header at offset " + std::to_string(offset) +
                      " (file has " + std::to_string(bytes.size()) + " bytes)");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void ExpectMagic(std::span<const std::uint8_t> bytes, std::uint32_t want, const char* file) {
  const std::uint32_t got = ReadBE32(bytes, 0, file);
  if (got != want) {
    throw FormatError(std::string(file) + ": bad magic " + Hex(got) + " at offset 0, expected " +
                      Hex(want));
  }
}

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

Dataset ParseIdx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                 int classes) {
  ExpectMagic(images, kImagesMagic, "images");
  const std::uint64_t n = ReadBE32(images, 4, "images");
  const std::uint64_t rows = ReadBE32(images, 8, "images");
  const std::uint64_t cols = ReadBE32(images, 12, "images");
  const std::uint64_t d = rows * cols;
  const std::uint64_t need = 16 + n * d;
  if (images.size() < need) {
    throw FormatError("images: truncated at offset " + std::to_string(images.size()) + ", expected " +
                      std::to_string(need) + " bytes for " + std::to_string(n) + " images of " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }

  ExpectMagic(labels, kLabelsMagic, "labels");
  const std::uint64_t count = ReadBE32(labels, 4, "labels");
  if (count != n) {
    throw FormatError("labels: count " + std::to_string(count) + " at offset 4 does not match " +
                      std::to_string(n) + " images");
  }
  if (labels.size() < 8 + n) {
    throw FormatError("labels: truncated at offset " + std::to_string(labels.size()) +
                      ", expected " + std::to_string(8 + n) + " bytes");
  }

  Dataset out;
  out.inputs = engine::Tensor({n, d});
  auto x = out.inputs.data();
  for (std::uint64_t i = 0; i < n * d; ++i) x[i] = images[16 + i] / 255.0;
  out.labels.resize(n);
  int max_label = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    out.labels[i] = labels[8 + i];
    max_label = std::max(max_label, out.labels[i]);
  }
  out.classes = classes > 0 ? classes : std::max(2, max_label + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (out.labels[i] >= out.classes) {
      throw FormatError("labels: label " + std::to_string(out.labels[i]) + " at offset " +
                        std::to_string(8 + i) + " is not below " + std::to_string(out.classes));
    }
  }
  return out;
}

Dataset LoadIdx(const std::filesystem::path& images, const std::filesystem::path& labels,
                int classes) {
  const auto img = ReadFile(images);
  const auto lbl = ReadFile(labels);
  return ParseIdx(img, lbl, classes);
}

}  // namespace dpflow::datasets
