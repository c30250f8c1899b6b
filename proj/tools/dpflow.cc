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

// dpflow: data-parallel training, scaling analysis and data inspection.
//
//   dpflow train   --ranks 4 --data synthetic:1,2000,20,4 --model mlp:20-32-4 --out log.csv
//   dpflow analyze --spec googlenet --base alexnet --p 1..16
//   dpflow data    --data idx:train-images,train-labels --shards 8
//
// Exit status: 0 success, 1 runtime or rank failure, 2 usage error.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpflow/comm/socket.h"
#include "dpflow/comm/spawn.h"
#include "dpflow/costmodel/model.h"
#include "dpflow/costmodel/network.h"
#include "dpflow/datasets/dataset.h"
#include "dpflow/datasets/partition.h"
#include "dpflow/parallel/driver.h"
#include "dpflow/parallel/records.h"

namespace {

using namespace dpflow;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct TrainFlags {
  int ranks = 1;
  std::string transport = "inproc";
  std::string data;
  std::string model;
  std::size_t batch = 64;
  std::size_t steps = 100;
  double lr = 0.05;
  double momentum = 0.0;
  std::string dtype = "f64";
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> shuffle;
  std::string out;
  std::optional<int> rank;
  std::string rendezvous = "127.0.0.1:0";
  double timeout_s = 120.0;
};

struct AnalyzeFlags {
  std::string spec;
  std::string base = "alexnet";
  std::string p = "1,2,4,8,16";
  std::string machine;
  std::optional<double> alpha, beta, gamma, bytes_per_param;
  std::string out;
};

struct DataFlags {
  std::string data;
  std::size_t shards = 1;
};

std::string Hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

datasets::Dataset LoadData(const std::string& spec) {
  try {
    return datasets::LoadDataSpec(spec);
  } catch (const datasets::DataSpecError& e) {
    throw UsageError(e.what());
  }
}

void Report(const parallel::ReplicaOutcome& outcome, const TrainFlags& f) {
  if (!f.out.empty()) {
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw Error("cannot write " + f.out);
    parallel::WriteStepCsv(out, outcome.records);
  }
  if (outcome.records.empty()) {
    std::cout << "final_loss none\n";
  } else {
    std::cout << "final_loss " << Num(outcome.records.back().loss) << "\n";
  }
  std::cout << "digest " << Hex(outcome.digest) << "\n";
}

int RunTrain(const TrainFlags& f) {
  if (f.ranks < 1) throw UsageError("--ranks must be at least 1");
  if (f.batch == 0) throw UsageError("--batch must be positive");
  if (f.dtype != "f32" && f.dtype != "f64") throw UsageError("--dtype must be f32 or f64");
  comm::WorldOptions world_options;
  try {
    world_options.transport = comm::ParseTransportKind(f.transport);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  world_options.rendezvous = f.rendezvous;
  world_options.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000));

  parallel::TrainJob job;
  try {
    job.layer_sizes = parallel::ParseMlpSpec(f.model);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  job.dtype = f.dtype == "f32" ? engine::DType::kFloat32 : engine::DType::kFloat64;
  job.options.learning_rate = f.lr;
  job.options.momentum = f.momentum;
  job.options.global_batch = f.batch;
  job.options.seed = f.seed;
  job.options.shuffle_seed = f.shuffle;
  job.steps = f.steps;

  const datasets::Dataset data = LoadData(f.data);

  if (f.rank) {
    // One rank of a multi-process world; every process names the same
    // rendezvous address, which rank 0 listens on.
    if (world_options.transport != comm::TransportKind::kSocket) {
      throw UsageError("--rank requires --transport socket");
    }
    if (*f.rank < 0 || *f.rank >= f.ranks) throw UsageError("--rank must be in [0, --ranks)");
    const comm::Endpoint rendezvous = comm::Endpoint::Parse(f.rendezvous);
    if (rendezvous.port == 0) throw UsageError("--rank requires a --rendezvous port");
    comm::CommWorld world(comm::SocketTransport::Create(*f.rank, f.ranks, rendezvous,
                                                        world_options.timeout));
    parallel::ReplicaOutcome outcome = parallel::TrainReplica(world, data, job);
    if (*f.rank == 0) {
      Report(outcome, f);
    } else {
      std::cout << "digest " << Hex(outcome.digest) << "\n";
    }
    return 0;
  }

  const std::vector<parallel::ReplicaOutcome> outcomes =
      parallel::RunTraining(data, job, f.ranks, world_options);
  for (const auto& o : outcomes) {
    if (o.digest != outcomes.front().digest) {
      throw Error("replica digests diverged");
    }
  }
  Report(outcomes.front(), f);
  return 0;
}

std::vector<int> ParsePList(const std::string& text) {
  auto number = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
      throw UsageError("bad --p value '" + text + "'");
    }
    return v;
  };
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = number(std::string_view(text).substr(0, dots));
    const int hi = number(std::string_view(text).substr(dots + 2));
    if (lo > hi) throw UsageError("bad --p range '" + text + "'");
    for (int p = lo; p <= hi; ++p) out.push_back(p);
    return out;
  }
  std::string_view rest = text;
  while (true) {
    const std::size_t comma = rest.find(',');
    out.push_back(number(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw UsageError("--p values must be strictly ascending");
  }
  return out;
}

costmodel::NetworkSpec ResolveSpec(const std::string& name) {
  try {
    return costmodel::ResolveNetwork(name);
  } catch (const costmodel::UnknownBuiltin& e) {
    throw UsageError(e.what());
  }
}

int RunAnalyze(const AnalyzeFlags& f) {
  const costmodel::NetworkSpec spec = ResolveSpec(f.spec);
  const costmodel::NetworkSpec base = ResolveSpec(f.base);
  const std::vector<int> p_list = ParsePList(f.p);

  costmodel::MachineParams machine =
      f.machine.empty() ? costmodel::CalibratedMachine() : costmodel::LoadMachineParams(f.machine);
  const bool overridden = f.alpha || f.beta || f.gamma || f.bytes_per_param;
  if (f.alpha) machine.alpha = *f.alpha;
  if (f.beta) machine.beta = *f.beta;
  if (f.gamma) machine.gamma = *f.gamma;
  if (f.bytes_per_param) machine.bytes_per_param = *f.bytes_per_param;
  if (overridden) {
    machine.calibration = false;
    machine.name = "custom";
  }
  try {
    machine.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::cerr << "machine " << (machine.name.empty() ? "unnamed" : machine.name)
            << (machine.calibration ? " (calibration, not a measurement)" : "") << "\n";

  const costmodel::Totals totals = costmodel::ComputeTotals(spec);
  const costmodel::Ratios ratios = costmodel::RatioRelativeTo(spec, base);
  std::cout << "network,base,flops_per_sample,params,compute_ratio,param_ratio,comp_per_param_ratio\n"
            << spec.name() << "," << base.name() << "," << Num(totals.flops_per_sample) << ","
            << Num(totals.params) << "," << Num(ratios.compute_ratio) << ","
            << Num(ratios.param_ratio) << "," << Num(ratios.comp_per_param_ratio) << "\n\n";

  const auto rows = costmodel::SpeedupCurve(spec, machine, p_list);
  costmodel::WriteSpeedupCsv(std::cout, rows);
  if (!f.out.empty()) {
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw Error("cannot write " + f.out);
    costmodel::WriteSpeedupCsv(out, rows);
  }
  return 0;
}

int RunData(const DataFlags& f) {
  if (f.shards == 0) throw UsageError("--shards must be at least 1");
  const datasets::Dataset data = LoadData(f.data);
  std::cout << "n " << data.size() << "\n"
            << "d " << data.dim() << "\n"
            << "classes " << data.classes << "\n"
            << "histogram";
  for (std::size_t count : data.LabelHistogram()) std::cout << " " << count;
  std::cout << "\n";
  for (std::size_t r = 0; r < f.shards; ++r) {
    const datasets::IndexRange range = datasets::Shard(data.size(), r, f.shards);
    std::cout << "shard " << r << " [" << range.begin << "," << range.end << ") " << range.size()
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-parallel training, scaling analysis and data inspection"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train an MLP with synchronous data-parallel SGD");
  train_cmd->add_option("--ranks", train.ranks, "Number of ranks")->capture_default_str();
  train_cmd->add_option("--transport", train.transport, "inproc or socket")->capture_default_str();
  train_cmd->add_option("--data", train.data,
                        "idx:<images>,<labels> | csv:<path>,<labelcol>[,<classes>] | "
                        "synthetic:<seed>,<n>,<d>,<classes>")
      ->required();
  train_cmd->add_option("--model", train.model, "mlp:<d>-<h1>-...-<classes>")->required();
  train_cmd->add_option("--batch", train.batch, "Global batch size")->capture_default_str();
  train_cmd->add_option("--steps", train.steps, "Number of SGD steps")->capture_default_str();
  train_cmd->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--momentum", train.momentum, "Momentum in [0, 1)")->capture_default_str();
  train_cmd->add_option("--dtype", train.dtype, "f32 or f64")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Initialization seed")->capture_default_str();
  train_cmd->add_option("--shuffle", train.shuffle, "Reshuffle every epoch with this seed");
  train_cmd->add_option("--out", train.out, "Per-step CSV log");
  train_cmd->add_option("--rank", train.rank, "This process's rank (multi-process socket runs)");
  train_cmd->add_option("--rendezvous", train.rendezvous, "host:port of rank 0")
      ->capture_default_str();
  train_cmd->add_option("--timeout", train.timeout_s, "Receive timeout in seconds")
      ->capture_default_str();

  AnalyzeFlags analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Predict strong-scaling speedups");
  analyze_cmd->add_option("--spec", analyze.spec, "Built-in network name or descriptor file")
      ->required();
  analyze_cmd->add_option("--base", analyze.base, "Network the ratios are relative to")
      ->capture_default_str();
  analyze_cmd->add_option("--p", analyze.p, "Rank counts: 1..N or a comma list")
      ->capture_default_str();
  analyze_cmd->add_option("--machine", analyze.machine, "Machine descriptor file");
  analyze_cmd->add_option("--alpha", analyze.alpha, "Seconds per message");
  analyze_cmd->add_option("--beta", analyze.beta, "Seconds per byte");
  analyze_cmd->add_option("--gamma", analyze.gamma, "FLOP/s");
  analyze_cmd->add_option("--bytes-per-param", analyze.bytes_per_param, "4 or 8");
  analyze_cmd->add_option("--out", analyze.out, "Write the speedup CSV here as well");

  DataFlags data;
  CLI::App* data_cmd = app.add_subcommand("data", "Summarize a dataset and its shards");
  data_cmd->add_option("--data", data.data, "Data source, as for train")->required();
  data_cmd->add_option("--shards", data.shards, "Number of shards")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) return RunTrain(train);
    if (analyze_cmd->parsed()) return RunAnalyze(analyze);
    return RunData(data);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
