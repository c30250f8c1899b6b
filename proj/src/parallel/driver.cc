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

#include "dpflow/parallel/driver.h"

namespace dpflow::parallel {

ReplicaOutcome TrainReplica(comm::CommWorld& world, const datasets::Dataset& data,
                            const TrainJob& job) {
  MlpModel model = BuildMlp(job.layer_sizes, job.dtype);
  TrainerOptions options = job.options;
  options.seed = job.options.seed + static_cast<std::uint64_t>(world.rank());
  ReplicaTrainer trainer(model, world, options);

  ReplicaOutcome out;
  out.records = trainer.Train(data, job.steps);
  out.digest = trainer.Digest();
  for (engine::NodeId v : model.variables) out.weights.push_back(trainer.session().variable(v));
  return out;
}

std::vector<ReplicaOutcome> RunTraining(const datasets::Dataset& data, const TrainJob& job,
                                        int ranks, const comm::WorldOptions& options) {
  return comm::WorldSpawn(
      ranks, [&](comm::CommWorld& world) { return TrainReplica(world, data, job); }, options);
}

}  // namespace dpflow::parallel
