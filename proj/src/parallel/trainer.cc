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

#include "dpflow/parallel/trainer.h"

#include <array>
#include <chrono>
#include <cstring>

#include "dpflow/comm/collectives.h"
#include "dpflow/comm/wire.h"
#include "dpflow/error.h"

namespace dpflow::parallel {
namespace {

using engine::DType;
using engine::NodeId;
using engine::Tensor;

std::int64_t NowNs() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::uint64_t Fnv(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Hash of the ordered variable list: ids, shapes and dtype.
std::uint64_t VariableListHash(const engine::Graph& g, std::span<const NodeId> vars) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = Fnv(h, static_cast<std::uint64_t>(g.dtype()));
  h = Fnv(h, vars.size());
  for (NodeId v : vars) {
    h = Fnv(h, v.index);
    const auto& shape = g.node(v).shape;
    h = Fnv(h, shape.size());
    for (std::size_t d : shape) h = Fnv(h, d);
  }
  return h;
}

// Reduces `buffer` across ranks in the model's dtype.
void ReduceInPlace(comm::CommWorld& world, std::vector<double>& buffer, DType dtype,
                   std::uint32_t key) {
  if (dtype == DType::kFloat64) {
    comm::AllreduceSum<double>(world, buffer, key);
    return;
  }
  std::vector<float> narrow(buffer.begin(), buffer.end());
  comm::AllreduceSum<float>(world, narrow, key);
  buffer.assign(narrow.begin(), narrow.end());
}

void BroadcastInPlace(comm::CommWorld& world, std::vector<double>& buffer, DType dtype,
                      std::uint32_t key) {
  if (dtype == DType::kFloat64) {
    comm::Broadcast<double>(world, buffer, 0, key);
    return;
  }
  std::vector<float> narrow(buffer.begin(), buffer.end());
  comm::Broadcast<float>(world, narrow, 0, key);
  buffer.assign(narrow.begin(), narrow.end());
}

}  // namespace

std::uint64_t VariableDigest(const engine::Session& session, std::span<const NodeId> vars) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (NodeId v : vars) h = engine::Fingerprint(session.variable(v), h);
  return h;
}

ReplicaTrainer::ReplicaTrainer(const MlpModel& model, comm::CommWorld& world,
                               TrainerOptions options)
    : model_(&model), world_(&world), options_(options), session_(model.graph) {
  if (options_.global_batch == 0) throw Error("global batch size must be positive");
  if (!(options_.learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (options_.momentum < 0.0 || options_.momentum >= 1.0) {
    throw Error("momentum must be in [0, 1)");
  }
  session_.InitializeVariables(options_.seed);
  for (NodeId v : model.variables) {
    velocity_.emplace_back(session_.variable(v).shape(), model.graph.dtype());
  }
  VerifyVariableList();
}

void ReplicaTrainer::VerifyVariableList() {
  const std::uint64_t local = VariableListHash(model_->graph, model_->variables);
  std::array<std::uint8_t, 8> bytes{};
  comm::internal::StoreLE(local, reinterpret_cast<std::byte*>(bytes.data()));
  comm::Broadcast<std::uint8_t>(*world_, bytes, 0);
  const std::uint64_t root = comm::internal::LoadLE<std::uint64_t>(
      reinterpret_cast<const std::byte*>(bytes.data()));
  std::array<double, 1> mismatch{root == local ? 0.0 : 1.0};
  comm::AllreduceSum<double>(*world_, mismatch);
  if (mismatch[0] != 0.0) {
    throw Error("ranks disagree on the model's variable list");
  }
}

void ReplicaTrainer::BroadcastModel() {
  const DType dtype = model_->graph.dtype();
  for (NodeId v : model_->variables) {
    const Tensor& current = session_.variable(v);
    std::vector<double> buffer(current.data().begin(), current.data().end());
    BroadcastInPlace(*world_, buffer, dtype, static_cast<std::uint32_t>(v.index));
    session_.SetVariable(v, Tensor(current.shape(), std::move(buffer), dtype));
  }
  for (Tensor& vel : velocity_) vel = Tensor(vel.shape(), dtype);
}

LocalGradients ReplicaTrainer::LocalGradientSums(const Tensor& inputs, const Tensor& onehot) {
  const DType dtype = model_->graph.dtype();
  LocalGradients out;
  out.samples = inputs.rank() == 2 ? inputs.dim(0) : 0;
  if (out.samples == 0) {
    for (NodeId v : model_->variables) out.sums.emplace_back(session_.variable(v).shape(), dtype);
    return out;
  }
  std::vector<NodeId> fetches;
  fetches.reserve(model_->gradients.size() + 1);
  fetches.push_back(model_->loss);
  fetches.insert(fetches.end(), model_->gradients.begin(), model_->gradients.end());
  engine::FeedMap feeds{{model_->inputs, inputs}, {model_->labels, onehot}};
  std::vector<Tensor> values = session_.Run(fetches, feeds);

  const double m = static_cast<double>(out.samples);
  out.loss_sum = values[0].scalar() * m;
  for (std::size_t i = 1; i < values.size(); ++i) {
    Tensor sum = std::move(values[i]);
    for (double& x : sum.data()) x *= m;
    sum.RoundToDType();
    out.sums.push_back(std::move(sum));
  }
  return out;
}

SyncedGradients ReplicaTrainer::SyncGradients(const LocalGradients& local) {
  const DType dtype = model_->graph.dtype();
  const auto& vars = model_->variables;
  if (local.sums.size() != vars.size()) {
    throw Error("gradient count does not match the variable count");
  }
  const double batch = static_cast<double>(options_.global_batch);
  SyncedGradients out;
  if (vars.empty()) {
    std::vector<double> loss{local.loss_sum};
    ReduceInPlace(*world_, loss, dtype, comm::kTagKeyMask);
    out.global_loss = loss[0] / batch;
    return out;
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const Tensor& sum = local.sums[i];
    std::vector<double> buffer(sum.data().begin(), sum.data().end());
    // The loss rides along with the last variable so a step costs exactly one
    // collective per variable.
    const bool last = i + 1 == vars.size();
    if (last) buffer.push_back(local.loss_sum);
    ReduceInPlace(*world_, buffer, dtype, static_cast<std::uint32_t>(vars[i].index));
    if (last) {
      out.global_loss = buffer.back() / batch;
      buffer.pop_back();
    }
    for (double& x : buffer) x /= batch;
    out.averaged.emplace_back(sum.shape(), std::move(buffer), dtype);
  }
  return out;
}

void ReplicaTrainer::ApplyUpdate(std::span<const Tensor> averaged) {
  const auto& vars = model_->variables;
  if (averaged.size() != vars.size()) {
    throw Error("update count does not match the variable count");
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Tensor& vel = velocity_[i];
    const Tensor& g = averaged[i];
    if (g.shape() != vel.shape()) {
      throw ShapeError("update for variable " + std::to_string(vars[i].index) + " has shape " +
                       engine::ShapeString(g.shape()) + ", expected " +
                       engine::ShapeString(vel.shape()));
    }
    auto v = vel.data();
    auto gd = g.data();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = options_.momentum * v[k] + gd[k];
    vel.RoundToDType();
    session_.AssignDelta(vars[i], vel, -options_.learning_rate);
  }
}

StepRecord ReplicaTrainer::Step(const datasets::Dataset& data, std::size_t step) {
  StepRecord rec;
  rec.step = step;
  rec.begin_ns = NowNs();
  const comm::TrafficStats before = world_->stats();

  const datasets::BatchSlice slice =
      datasets::MakeBatchSlice(data.size(), options_.global_batch, step,
                               static_cast<std::size_t>(world_->rank()),
                               static_cast<std::size_t>(world_->size()));
  if (options_.shuffle_seed && !shuffle_) shuffle_.emplace(data.size(), *options_.shuffle_seed);
  const std::vector<std::size_t> indices = shuffle_ ? shuffle_->indices(slice) : slice.indices();
  const datasets::Batch batch = datasets::GatherBatch(data, indices, model_->graph.dtype());

  LocalGradients local = LocalGradientSums(batch.inputs, batch.onehot);
  rec.sync_ns = NowNs();
  SyncedGradients synced = SyncGradients(local);
  ApplyUpdate(synced.averaged);

  const comm::TrafficStats after = world_->stats();
  rec.loss = synced.global_loss;
  rec.messages = after.messages_sent - before.messages_sent;
  rec.bytes = after.bytes_sent - before.bytes_sent;
  rec.digest = Digest();
  rec.wall_ms = static_cast<double>(NowNs() - rec.begin_ns) / 1e6;
  return rec;
}

std::vector<StepRecord> ReplicaTrainer::Train(const datasets::Dataset& data, std::size_t steps) {
  data.Validate();
  if (data.dim() != model_->layer_sizes.front()) {
    throw ShapeError("dataset has " + std::to_string(data.dim()) + " features, model expects " +
                     std::to_string(model_->layer_sizes.front()));
  }
  if (static_cast<std::size_t>(data.classes) != model_->layer_sizes.back()) {
    throw ShapeError("dataset has " + std::to_string(data.classes) + " classes, model expects " +
                     std::to_string(model_->layer_sizes.back()));
  }
  BroadcastModel();
  std::vector<StepRecord> records;
  records.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) records.push_back(Step(data, s));
  return records;
}

std::uint64_t ReplicaTrainer::Digest() const { return VariableDigest(session_, model_->variables); }

}  // namespace dpflow::parallel
