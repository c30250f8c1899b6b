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

#include "dpflow/costmodel/model.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>

#include "json.hpp"

namespace dpflow::costmodel {

void MachineParams::Validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(alpha) || !positive(beta) || !positive(gamma) || !positive(bytes_per_param)) {
    throw Error("machine parameters alpha, beta, gamma and bytes_per_param must all be positive");
  }
}

MachineParams ParseMachineParams(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("machine descriptor: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("machine descriptor: top level is not an object");
  MachineParams m;
  auto number = [&](const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number()) {
      throw FormatError(std::string("machine descriptor: missing numeric field '") + key + "'");
    }
    return it->get<double>();
  };
  m.alpha = number("alpha");
  m.beta = number("beta");
  m.gamma = number("gamma");
  m.bytes_per_param = number("bytes_per_param");
  m.name = doc.value("name", std::string());
  m.calibration = doc.value("calibration", false);
  m.Validate();
  return m;
}

MachineParams LoadMachineParams(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseMachineParams(text);
}

MachineParams CalibratedMachine() {
  return ParseMachineParams(EmbeddedDescriptor("machines/k40_calibrated"));
}

int CeilLog2(int p) {
  int rounds = 0;
  while ((1LL << rounds) < p) ++rounds;
  return rounds;
}

std::size_t ReducedTensorCount(const NetworkSpec& spec) {
  std::size_t n = 0;
  for (const LayerSpec& l : spec.layers()) n += l.params > 0.0 ? 1 : 0;
  return n;
}

ScalingPrediction Predict(const NetworkSpec& spec, const MachineParams& machine, int p,
                          std::size_t batch, std::size_t num_reduced_tensors) {
  if (p < 1) throw Error("p must be at least 1, got " + std::to_string(p));
  machine.Validate();
  const Totals totals = ComputeTotals(spec);
  const double work = static_cast<double>(batch) * totals.flops_per_sample;
  const double serial = work / machine.gamma;

  ScalingPrediction out;
  out.p = p;
  out.t_compute = serial / p;
  const double per_round = static_cast<double>(num_reduced_tensors) * machine.alpha +
                           machine.beta * machine.bytes_per_param * totals.params;
  out.t_comm = CeilLog2(p) * per_round;
  out.t_total = out.t_compute + out.t_comm;
  out.speedup = p == 1 ? 1.0 : serial / out.t_total;
  return out;
}

ScalingPrediction Predict(const NetworkSpec& spec, const MachineParams& machine, int p) {
  return Predict(spec, machine, p, spec.default_batch(), ReducedTensorCount(spec));
}

std::vector<ScalingPrediction> SpeedupCurve(const NetworkSpec& spec, const MachineParams& machine,
                                            std::span<const int> p_list) {
  if (p_list.empty()) throw Error("p list is empty");
  std::vector<ScalingPrediction> rows;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    if (i > 0 && p_list[i] <= p_list[i - 1]) throw Error("p list must be strictly ascending");
    rows.push_back(Predict(spec, machine, p_list[i]));
  }
  return rows;
}

void WriteSpeedupCsv(std::ostream& out, std::span<const ScalingPrediction> rows) {
  out << "p,t_compute,t_comm,t_total,speedup\n";
  char buf[192];
  for (const ScalingPrediction& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.p, r.t_compute, r.t_comm,
                  r.t_total, r.speedup);
    out << buf;
  }
}

}  // namespace dpflow::costmodel
