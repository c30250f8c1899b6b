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

#ifndef DPFLOW_PARALLEL_TRAINER_H_
#define DPFLOW_PARALLEL_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpflow/comm/world.h"
#include "dpflow/datasets/dataset.h"
#include "dpflow/datasets/partition.h"
#include "dpflow/engine/session.h"
#include "dpflow/parallel/mlp.h"

namespace dpflow::parallel {

struct TrainerOptions {
  double learning_rate = 0.05;
  double momentum = 0.0;       // in [0, 1)
  std::size_t global_batch = 64;
  std::uint64_t seed = 1;      // this rank's initialization seed
  std::optional<std::uint64_t> shuffle_seed;
};

struct LocalGradients {
  std::vector<engine::Tensor> sums;  // per variable, summed over the local samples
  double loss_sum = 0.0;
  std::size_t samples = 0;
};

struct SyncedGradients {
  std::vector<engine::Tensor> averaged;  // divided by the global batch size
  double global_loss = 0.0;
};

struct StepRecord {
  std::size_t step = 0;
  double loss = 0.0;  // global mean loss of the step's batch, before the update
  double wall_ms = 0.0;
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::int64_t begin_ns = 0;  // steady clock, step entry
  std::int64_t sync_ns = 0;   // steady clock, entry into gradient reduction
  std::uint64_t digest = 0;   // replica digest after the update
};

// One rank's model replica in synchronous data-parallel SGD. Variables are
// broadcast from rank 0 and gradients reduced one collective per variable,
// both in canonical (ascending NodeId) order, so every rank applies the same
// update and the run matches a single-rank run on the same global batches.
class ReplicaTrainer {
 public:
  // Initializes the local variables from options.seed and checks, through a
  // broadcast from rank 0, that every rank has the same variable list.
  ReplicaTrainer(const MlpModel& model, comm::CommWorld& world, TrainerOptions options);

  // Overwrites every variable with rank 0's value.
  void BroadcastModel();

  // Gradient sums and loss sum over the given samples; no communication.
  // An empty batch yields zeros.
  LocalGradients LocalGradientSums(const engine::Tensor& inputs, const engine::Tensor& onehot);

  SyncedGradients SyncGradients(const LocalGradients& local);

  // v <- momentum * v + g;  w <- w - learning_rate * v
  void ApplyUpdate(std::span<const engine::Tensor> averaged);

  StepRecord Step(const datasets::Dataset& data, std::size_t step);

  // BroadcastModel, then `steps` steps.
  std::vector<StepRecord> Train(const datasets::Dataset& data, std::size_t steps);

  // FNV-1a over the bytes of every variable, in canonical order.
  std::uint64_t Digest() const;

  const engine::Session& session() const { return session_; }
  engine::Session& session() { return session_; }
  const MlpModel& model() const { return *model_; }
  comm::CommWorld& world() { return *world_; }
  const TrainerOptions& options() const { return options_; }
  const std::vector<engine::Tensor>& velocities() const { return velocity_; }

 private:
  void VerifyVariableList();

  const MlpModel* model_;
  comm::CommWorld* world_;
  TrainerOptions options_;
  engine::Session session_;
  std::vector<engine::Tensor> velocity_;
  std::optional<datasets::EpochShuffle> shuffle_;
};

// Digest of a session's variables in the given order.
std::uint64_t VariableDigest(const engine::Session& session, std::span<const engine::NodeId> vars);

}  // namespace dpflow::parallel

#endif  // DPFLOW_PARALLEL_TRAINER_H_
