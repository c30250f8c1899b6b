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

#ifndef DPFLOW_COSTMODEL_NETWORK_H_
#define DPFLOW_COSTMODEL_NETWORK_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dpflow/error.h"

namespace dpflow::costmodel {

struct LayerSpec {
  std::string name;
  double flops_per_sample = 0.0;  // forward + backward
  double params = 0.0;
};

class NetworkSpec {
 public:
  // Throws Error on an empty layer list, negative counts or a zero batch.
  NetworkSpec(std::string name, std::vector<LayerSpec> layers, std::size_t default_batch);

  const std::string& name() const { return name_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t default_batch() const { return default_batch_; }

 private:
  std::string name_;
  std::vector<LayerSpec> layers_;
  std::size_t default_batch_;
};

struct Totals {
  double flops_per_sample = 0.0;
  double params = 0.0;
};

Totals ComputeTotals(const NetworkSpec& spec);

struct Ratios {
  double compute_ratio = 0.0;
  double param_ratio = 0.0;
  double comp_per_param_ratio = 0.0;
};

// Element-wise ratios of spec's totals to base's. Throws if a base total or
// the network's parameter count is zero.
Ratios RatioRelativeTo(const NetworkSpec& spec, const NetworkSpec& base);

// Descriptor JSON: {name, default_batch, layers: [{name, flops_per_sample, params}]}.
NetworkSpec ParseNetworkSpec(std::string_view json);
NetworkSpec LoadNetworkSpec(const std::filesystem::path& path);

class UnknownBuiltin : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> BuiltinNetworkNames();
NetworkSpec BuiltinNetwork(std::string_view name);  // throws UnknownBuiltin

// Raw text of an embedded descriptor, e.g. "networks/alexnet".
std::string_view EmbeddedDescriptor(std::string_view key);

// A built-in name, or else a path to a descriptor file.
NetworkSpec ResolveNetwork(std::string_view name_or_path);

}  // namespace dpflow::costmodel

#endif  // DPFLOW_COSTMODEL_NETWORK_H_
