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

#ifndef DPFLOW_PARALLEL_DRIVER_H_
#define DPFLOW_PARALLEL_DRIVER_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpflow/comm/spawn.h"
#include "dpflow/comm/world.h"
#include "dpflow/datasets/dataset.h"
#include "dpflow/engine/tensor.h"
#include "dpflow/parallel/trainer.h"

namespace dpflow::parallel {

struct TrainJob {
  std::vector<std::size_t> layer_sizes;
  engine::DType dtype = engine::DType::kFloat64;
  TrainerOptions options;  // options.seed is the base seed; rank r uses seed + r
  std::size_t steps = 0;
};

struct ReplicaOutcome {
  std::vector<StepRecord> records;
  std::uint64_t digest = 0;
  std::vector<engine::Tensor> weights;  // canonical order
};

// Trains one replica inside an existing world.
ReplicaOutcome TrainReplica(comm::CommWorld& world, const datasets::Dataset& data,
                            const TrainJob& job);

// Spawns `ranks` replicas and returns every rank's outcome in rank order.
std::vector<ReplicaOutcome> RunTraining(const datasets::Dataset& data, const TrainJob& job,
                                        int ranks, const comm::WorldOptions& options = {});

}  // namespace dpflow::parallel

#endif  // DPFLOW_PARALLEL_DRIVER_H_
