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

#include "dpflow/costmodel/network.h"

#include <cmath>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace dpflow::costmodel {
namespace internal {
const std::vector<std::pair<std::string_view, std::string_view>>& EmbeddedDescriptors();
}  // namespace internal

namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(std::string(where) + ": missing field '" + key + "'");
  }
  return *it;
}

double Count(const json& obj, const char* key, std::string_view where) {
  const json& v = Field(obj, key, where);
  if (!v.is_number()) throw FormatError(std::string(where) + ": field '" + key + "' is not a number");
  return v.get<double>();
}

}  // namespace

NetworkSpec::NetworkSpec(std::string name, std::vector<LayerSpec> layers,
                         std::size_t default_batch)
    : name_(std::move(name)), layers_(std::move(layers)), default_batch_(default_batch) {
  if (layers_.empty()) throw Error("network '" + name_ + "' has no layers");
  if (default_batch_ == 0) throw Error("network '" + name_ + "' has a zero default batch");
  for (const LayerSpec& l : layers_) {
    if (!(l.flops_per_sample >= 0.0) || !(l.params >= 0.0) || !std::isfinite(l.flops_per_sample) ||
        !std::isfinite(l.params)) {
      throw Error("network '" + name_ + "', layer '" + l.name + "': counts must be finite and >= 0");
    }
  }
}

Totals ComputeTotals(const NetworkSpec& spec) {
  Totals t;
  for (const LayerSpec& l : spec.layers()) {
    t.flops_per_sample += l.flops_per_sample;
    t.params += l.params;
  }
  return t;
}

Ratios RatioRelativeTo(const NetworkSpec& spec, const NetworkSpec& base) {
  const Totals s = ComputeTotals(spec);
  const Totals b = ComputeTotals(base);
  if (b.flops_per_sample == 0.0 || b.params == 0.0) {
    throw Error("base network '" + base.name() + "' has zero compute or parameters");
  }
  if (s.params == 0.0) throw Error("network '" + spec.name() + "' has no parameters");
  Ratios r;
  r.compute_ratio = s.flops_per_sample / b.flops_per_sample;
  r.param_ratio = s.params / b.params;
  r.comp_per_param_ratio = (s.flops_per_sample / s.params) / (b.flops_per_sample / b.params);
  return r;
}

NetworkSpec ParseNetworkSpec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("network descriptor: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("network descriptor: top level is not an object");
  const json& name = Field(doc, "name", "network descriptor");
  if (!name.is_string()) throw FormatError("network descriptor: 'name' is not a string");
  const double batch = Count(doc, "default_batch", "network descriptor");
  if (batch < 1 || batch != std::floor(batch)) {
    throw FormatError("network descriptor: 'default_batch' must be a positive integer");
  }
  const json& layers = Field(doc, "layers", "network descriptor");
  if (!layers.is_array()) throw FormatError("network descriptor: 'layers' is not an array");

  std::vector<LayerSpec> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i);
    const json& l = layers[i];
    if (!l.is_object()) throw FormatError(where + ": not an object");
    LayerSpec spec;
    if (auto it = l.find("name"); it != l.end() && it->is_string()) {
      spec.name = it->get<std::string>();
    } else {
      spec.name = where;
    }
    spec.flops_per_sample = Count(l, "flops_per_sample", where);
    spec.params = Count(l, "params", where);
    out.push_back(std::move(spec));
  }
  return NetworkSpec(name.get<std::string>(), std::move(out), static_cast<std::size_t>(batch));
}

NetworkSpec LoadNetworkSpec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return ParseNetworkSpec(text);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string_view EmbeddedDescriptor(std::string_view key) {
  for (const auto& [k, text] : internal::EmbeddedDescriptors()) {
    if (k == key) return text;
  }
  throw UnknownBuiltin("no embedded descriptor '" + std::string(key) + "'");
}

std::vector<std::string> BuiltinNetworkNames() {
  constexpr std::string_view kPrefix = "networks/";
  std::vector<std::string> names;
  for (const auto& [k, text] : internal::EmbeddedDescriptors()) {
    if (k.substr(0, kPrefix.size()) == kPrefix) names.emplace_back(k.substr(kPrefix.size()));
  }
  return names;
}

NetworkSpec BuiltinNetwork(std::string_view name) {
  for (const auto& [k, text] : internal::EmbeddedDescriptors()) {
    if (k == "networks/" + std::string(name)) return ParseNetworkSpec(text);
  }
  std::string known;
  for (const std::string& n : BuiltinNetworkNames()) known += (known.empty() ? "" : ", ") + n;
  throw UnknownBuiltin("unknown built-in network '" + std::string(name) + "' (known: " + known + ")");
}

NetworkSpec ResolveNetwork(std::string_view name_or_path) {
  for (const std::string& n : BuiltinNetworkNames()) {
    if (n == name_or_path) return BuiltinNetwork(n);
  }
  const std::filesystem::path path(name_or_path);
  if (std::filesystem::exists(path)) return LoadNetworkSpec(path);
  return BuiltinNetwork(name_or_path);
}

}  // namespace dpflow::costmodel
