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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>

#include "dpflow/error.h"

namespace dpflow::datasets {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool ParseNumber(std::string_view field, double& out) {
  field = Trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void Fail(std::size_t line, const std::string& what) {
  throw FormatError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset ParseCsv(std::string_view text, std::size_t label_column, int classes) {
  if (classes != 0 && classes < 2) throw FormatError("csv: classes must be at least 2");
  constexpr double kMaxInferredLabel = 1 << 20;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t width = 0;
  bool first = true;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;

    const auto fields = SplitFields(line);
    double probe = 0.0;
    if (first && !ParseNumber(fields.front(), probe)) {
      first = false;
      continue;  // header
    }
    if (width == 0) {
      width = fields.size();
      if (label_column >= width) {
        Fail(line_no, "label column " + std::to_string(label_column) + " but rows have " +
                          std::to_string(width) + " fields");
      }
      if (width < 2) Fail(line_no, "need a label column and at least one feature");
    } else if (fields.size() != width) {
      Fail(line_no, "ragged row: expected " + std::to_string(width) + " fields, got " +
                        std::to_string(fields.size()));
    }
    first = false;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = 0.0;
      if (!ParseNumber(fields[j], v)) {
        Fail(line_no, "field " + std::to_string(j + 1) + " is not numeric: '" +
                          std::string(Trim(fields[j])) + "'");
      }
      if (j == label_column) {
        const double limit = classes == 0 ? kMaxInferredLabel : classes;
        if (v != std::floor(v) || v < 0 || v >= limit) {
          Fail(line_no, "label " + std::string(Trim(fields[j])) + " is not an integer in [0, " +
                            std::to_string(static_cast<long>(limit)) + ")");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        if (!std::isfinite(v)) Fail(line_no, "field " + std::to_string(j + 1) + " is not finite");
        values.push_back(v);
      }
    }
  }
  if (labels.empty()) throw FormatError("csv: no data rows");

  Dataset out;
  out.inputs = engine::Tensor({labels.size(), width - 1}, std::move(values));
  out.labels = std::move(labels);
  out.classes = classes != 0 ? classes
                             : std::max(2, *std::max_element(out.labels.begin(), out.labels.end()) + 1);
  return out;
}

Dataset LoadCsv(const std::filesystem::path& path, std::size_t label_column, int classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::string text(std::istreambuf_iterator<char>(in), {});
  try {
    return ParseCsv(text, label_column, classes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteCsv(std::ostream& out, const Dataset& data, std::size_t label_column, bool header) {
  const std::size_t d = data.dim();
  const std::size_t width = d + 1;
  if (label_column >= width) throw Error("label column out of range");
  char buf[40];
  if (header) {
    for (std::size_t j = 0, f = 0; j < width; ++j) {
      if (j) out << ',';
      if (j == label_column) {
        out << "label";
      } else {
        out << 'x' << f++;
      }
    }
    out << '\n';
  }
  auto x = data.inputs.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0, f = 0; j < width; ++j) {
      if (j) out << ',';
      if (j == label_column) {
        out << data.labels[i];
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", x[i * d + f++]);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace dpflow::datasets
