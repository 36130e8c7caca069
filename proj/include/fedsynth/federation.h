/**
 * Copyright 2026 The fedsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSYNTH_FEDERATION_H_
#define FEDSYNTH_FEDERATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedsynth/dataset.h"
#include "fedsynth/genmodel.h"
#include "fedsynth/learner.h"
#include "fedsynth/metrics.h"
#include "fedsynth/partition.h"
#include "fedsynth/rng.h"
#include "fedsynth/worldgen.h"

namespace fedsynth {

// none: plain FedAvg on real data. regl-tf: top up every class from the
// foundation generator. regl-ft: adapt the generator to the client's own
// data first, then top up.
enum class Strategy { kNone, kReglTf, kReglFt };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string &name);

struct FedConfig {
  int rounds = 200;
  double fraction = 1.0;
  Strategy strategy = Strategy::kReglFt;
  std::size_t target_per_class = 200;
  double alpha = 0.8;
  int pers_epochs = 50;
  TrainConfig train;
  Arch arch = Arch::kSoftmax;
  int hidden = 32;
  // Threads used for the per-round client stage. Results do not depend on it.
  int workers = 1;

  bool operator==(const FedConfig &) const = default;
};

void validate_fed_config(const FedConfig &cfg);

struct ClientState {
  int id = 0;
  Dataset real;
  Dataset synthetic;
  Dataset combined;  // real followed by synthetic
  Dataset local_test;
  std::optional<Generator> adapted;  // regl-ft with an estimable gap
  std::optional<double> w2_foundation;
  std::optional<double> w2_adapted;
};

std::vector<ClientState> prepare_clients(const World &world, const Partition &part,
                                         const FedConfig &cfg, const Generator &foundation,
                                         RngStream stream);

struct ClientUpdate {
  ModelParams params;
  std::size_t sample_count = 0;
};

// sum_m (N_m / K) * params_m with K = sum_m N_m, summed in the given order.
ModelParams aggregate(std::span<const ClientUpdate> updates);

// ceil(f * M) distinct client ids, ascending.
std::vector<int> select_clients(int client_count, double fraction, RngStream stream);

struct GeneralizationResult {
  ModelParams global;
  std::vector<RoundRecord> rounds;
};

GeneralizationResult run_generalization(const std::vector<ClientState> &clients,
                                        const FedConfig &cfg, const World &world,
                                        RngStream stream);

// Same loop starting from given params; `first_round` offsets record indices
// and stream paths so a run can be split without changing its result.
GeneralizationResult continue_generalization(const std::vector<ClientState> &clients,
                                             const FedConfig &cfg, const World &world,
                                             ModelParams start, int first_round,
                                             RngStream stream);

ModelParams initial_global_params(const World &world, const FedConfig &cfg,
                                  RngStream stream);

struct PersonalizationResult {
  std::vector<ModelParams> params;
  std::vector<std::optional<double>> initial_accuracy;  // global model, epoch 0
  std::vector<std::optional<double>> best_accuracy;
  std::vector<int> excluded;  // clients with an empty local test split
  std::optional<double> mean_initial;
  std::optional<double> mean_best;
};

PersonalizationResult run_personalization(const ModelParams &global,
                                          const std::vector<ClientState> &clients,
                                          const FedConfig &cfg, RngStream stream);

// Baseline on the pooled train set with the same total epoch budget
// (rounds * local_epochs) and optimizer settings.
ModelParams train_centralized(const World &world, const FedConfig &cfg, RngStream stream);

}  // namespace fedsynth

#endif  // FEDSYNTH_FEDERATION_H_
