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

#ifndef DPFLOW_COSTMODEL_MODEL_H_
#define DPFLOW_COSTMODEL_MODEL_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpflow/costmodel/network.h"

namespace dpflow::costmodel {

struct MachineParams {
  double alpha = 0.0;  // seconds per message
  double beta = 0.0;   // seconds per byte
  double gamma = 0.0;  // FLOP/s
  double bytes_per_param = 4.0;
  std::string name;
  bool calibration = false;  // fitted to reported speedups rather than measured

  void Validate() const;  // all four numbers strictly positive
};

MachineParams ParseMachineParams(std::string_view json);
MachineParams LoadMachineParams(const std::filesystem::path& path);

// The shipped K40 calibration.
MachineParams CalibratedMachine();

struct ScalingPrediction {
  int p = 1;
  double t_compute = 0.0;
  double t_comm = 0.0;
  double t_total = 0.0;
  double speedup = 1.0;  // T(1) / T(p)
};

// Layers that carry parameters; each is reduced as one tensor.
std::size_t ReducedTensorCount(const NetworkSpec& spec);

// T(p) = C / (gamma p) + ceil(log2 p) (n alpha + beta bytes_per_param P), with
// C = batch * flops_per_sample, P the total parameter count and n the number
// of reduced tensors.
ScalingPrediction Predict(const NetworkSpec& spec, const MachineParams& machine, int p,
                          std::size_t batch, std::size_t num_reduced_tensors);
ScalingPrediction Predict(const NetworkSpec& spec, const MachineParams& machine, int p);

// One row per p at the network's default batch. p_list must be nonempty and
// strictly ascending.
std::vector<ScalingPrediction> SpeedupCurve(const NetworkSpec& spec, const MachineParams& machine,
                                            std::span<const int> p_list);

// Header "p,t_compute,t_comm,t_total,speedup".
void WriteSpeedupCsv(std::ostream& out, std::span<const ScalingPrediction> rows);

int CeilLog2(int p);

}  // namespace dpflow::costmodel

#endif  // DPFLOW_COSTMODEL_MODEL_H_
