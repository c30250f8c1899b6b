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

#include "dpflow/datasets/dataset.h"

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace dpflow::datasets {
namespace {

std::vector<std::string_view> SplitCommas(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    std::size_t comma = s.find(',');
    out.push_back(s.substr(0, comma));
    if (comma == std::string_view::npos) return out;
    s = s.substr(comma + 1);
  }
}

template <typename T>
T Integer(std::string_view field, std::string_view what, std::string_view spec) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataSpecError("bad " + std::string(what) + " '" + std::string(field) +
                        "' in data spec '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

Dataset LoadDataSpec(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw DataSpecError("data spec '" + std::string(spec) +
                        "' must start with idx:, csv: or synthetic:");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::vector<std::string_view> args = SplitCommas(spec.substr(colon + 1));

  if (kind == "idx") {
    if (args.size() != 2) throw DataSpecError("expected idx:<images>,<labels>");
    return LoadIdx(std::string(args[0]), std::string(args[1]));
  }
  if (kind == "csv") {
    if (args.size() != 2 && args.size() != 3) {
      throw DataSpecError("expected csv:<path>,<label column>[,<classes>]");
    }
    const auto column = Integer<std::size_t>(args[1], "label column", spec);
    const int classes = args.size() == 3 ? Integer<int>(args[2], "class count", spec) : 0;
    return LoadCsv(std::string(args[0]), column, classes);
  }
  if (kind == "synthetic") {
    if (args.size() != 4) throw DataSpecError("expected synthetic:<seed>,<n>,<d>,<classes>");
    const auto seed = Integer<std::uint64_t>(args[0], "seed", spec);
    const auto n = Integer<std::size_t>(args[1], "sample count", spec);
    const auto d = Integer<std::size_t>(args[2], "dimension", spec);
    const auto classes = Integer<int>(args[3], "class count", spec);
    if (n == 0 || d == 0 || classes < 2) {
      throw DataSpecError("synthetic data needs n >= 1, d >= 1 and at least 2 classes");
    }
    return Synthetic(seed, n, d, classes);
  }
  throw DataSpecError("unknown data source '" + std::string(kind) + "' in '" + std::string(spec) +
                      "'");
}

}  // namespace dpflow::datasets
