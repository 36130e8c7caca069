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

#include "fedsynth/federation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include "fedsynth/error.h"

namespace fedsynth {

namespace {

// Runs fn(0..n-1) on up to `workers` threads. Each index writes only its
// own output slot, so the result is independent of scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)> &fn) {
  const auto threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

RoundRecord evaluate_round(int round, const ModelParams &global, const World &world) {
  RoundRecord rec;
  rec.round = round;
  rec.global_accuracy = accuracy(global, world.test_pool);
  rec.class_accuracy = class_accuracy(global, world.test_pool);
  return rec;
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kNone:
      return "none";
    case Strategy::kReglTf:
      return "regl-tf";
    case Strategy::kReglFt:
      return "regl-ft";
  }
  return "none";
}

Strategy parse_strategy(const std::string &name) {
  if (name == "none") return Strategy::kNone;
  if (name == "regl-tf") return Strategy::kReglTf;
  if (name == "regl-ft") return Strategy::kReglFt;
  throw InvalidArgument("unknown strategy '" + name + "'");
}

void validate_fed_config(const FedConfig &cfg) {
  if (cfg.rounds < 1) throw InvalidArgument("federation: rounds must be >= 1");
  if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0)) {
    throw InvalidArgument("federation: fraction must lie in (0, 1]");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw InvalidArgument("federation: alpha must lie in [0, 1]");
  }
  if (cfg.pers_epochs < 0) throw InvalidArgument("federation: pers_epochs must be >= 0");
  if (cfg.arch == Arch::kMlp1 && cfg.hidden < 1) {
    throw InvalidArgument("federation: mlp1 needs hidden >= 1");
  }
  validate_train_config(cfg.train);
  if (cfg.train.local_epochs < 1) {
    throw InvalidArgument("federation: local_epochs must be >= 1");
  }
}

std::vector<ClientState> prepare_clients(const World &world, const Partition &part,
                                         const FedConfig &cfg, const Generator &foundation,
                                         RngStream stream) {
  const Dataset &pool = world.train_pool;
  std::vector<ClientState> clients;
  clients.reserve(static_cast<std::size_t>(part.client_count));
  const double foundation_w2 = w2_to_global(foundation, world.spec).mean;

  for (int m = 0; m < part.client_count; ++m) {
    const auto ms = static_cast<std::size_t>(m);
    IndexList rows = part.client_train_indices(m);
    ClientState client{m,
                       pool.subset(rows),
                       Dataset(pool.class_count(), pool.dim()),
                       Dataset(pool.class_count(), pool.dim()),
                       Dataset(pool.class_count(), pool.dim()),
                       std::nullopt,
                       std::nullopt,
                       std::nullopt};
    if (ms < part.test_indices.size()) {
      client.local_test = world.test_pool.subset(part.test_indices[ms]);
    }

    if (cfg.strategy != Strategy::kNone) {
      const Generator *source = &foundation;
      if (cfg.strategy == Strategy::kReglFt) {
        client.w2_foundation = foundation_w2;
        LabelHistogram hist = client.real.label_histogram();
        bool estimable = std::any_of(hist.begin(), hist.end(),
                                     [](std::size_t n) { return n >= 2; });
        if (estimable) {
          GapEstimate gap = estimate_gap(foundation, client.real);
          client.adapted = adapt(foundation, gap, cfg.alpha);
          client.w2_adapted = w2_to_global(*client.adapted, world.spec).mean;
          source = &*client.adapted;
        } else {
          client.w2_adapted = foundation_w2;
        }
      }
      std::vector<std::size_t> plan =
          plan_synthesis(client.real.label_histogram(), cfg.target_per_class);
      for (std::size_t c = 0; c < plan.size(); ++c) {
        if (plan[c] == 0) continue;
        RngStream draw = stream.derive({tag(StreamTag::kSynthesis),
                                        static_cast<std::uint64_t>(m),
                                        static_cast<std::uint64_t>(c)});
        client.synthetic.append(synthesize(*source, static_cast<int>(c), plan[c], draw));
      }
    }
    client.combined = client.real;
    client.combined.append(client.synthetic);
    clients.push_back(std::move(client));
  }
  return clients;
}

ModelParams aggregate(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw InvalidArgument("aggregate: no client updates");
  const ModelParams &first = updates.front().params;
  std::size_t total = 0;
  for (const auto &u : updates) {
    if (u.params.arch != first.arch || u.params.dim != first.dim ||
        u.params.classes != first.classes || u.params.hidden != first.hidden ||
        u.params.values.size() != first.values.size()) {
      throw InvalidArgument("aggregate: parameter shape mismatch");
    }
    total += u.sample_count;
  }
  if (total == 0) throw InvalidArgument("aggregate: total sample count K is zero");

  ModelParams out = first;
  std::fill(out.values.begin(), out.values.end(), 0.0);
  const double k = static_cast<double>(total);
  for (const auto &u : updates) {
    const double w = static_cast<double>(u.sample_count) / k;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += w * u.params.values[i];
  }
  return out;
}

std::vector<int> select_clients(int client_count, double fraction, RngStream stream) {
  if (client_count < 1) throw InvalidArgument("select_clients: no clients");
  auto take = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(client_count) - 1e-12));
  take = std::clamp<std::size_t>(take, 1, static_cast<std::size_t>(client_count));
  std::vector<int> ids(static_cast<std::size_t>(client_count));
  std::iota(ids.begin(), ids.end(), 0);
  if (take < ids.size()) {
    for (std::size_t i = 0; i < take; ++i) {
      std::size_t j = i + static_cast<std::size_t>(stream.uniform_index(ids.size() - i));
      std::swap(ids[i], ids[j]);
    }
    ids.resize(take);
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

ModelParams initial_global_params(const World &world, const FedConfig &cfg,
                                  RngStream stream) {
  return init_params(cfg.arch, world.spec.dim, world.spec.class_count, cfg.hidden,
                     stream.derive({tag(StreamTag::kInit)}));
}

GeneralizationResult continue_generalization(const std::vector<ClientState> &clients,
                                             const FedConfig &cfg, const World &world,
                                             ModelParams start, int first_round,
                                             RngStream stream) {
  validate_fed_config(cfg);
  if (clients.empty()) throw InvalidArgument("run_generalization: no clients");
  GeneralizationResult result{std::move(start), {}};
  result.rounds.reserve(static_cast<std::size_t>(cfg.rounds));
  const int client_count = static_cast<int>(clients.size());

  for (int t = first_round; t < first_round + cfg.rounds; ++t) {
    const auto round_id = static_cast<std::uint64_t>(t);
    std::vector<int> selected = select_clients(
        client_count, cfg.fraction,
        stream.derive({tag(StreamTag::kRound), round_id, tag(StreamTag::kSelection)}));

    std::vector<ClientUpdate> updates(selected.size());
    parallel_for(selected.size(), cfg.workers, [&](std::size_t i) {
      const ClientState &client = clients[static_cast<std::size_t>(selected[i])];
      if (client.combined.empty()) {
        updates[i] = {result.global, 0};
        return;
      }
      RngStream local = stream.derive({tag(StreamTag::kRound), round_id,
                                       tag(StreamTag::kClient),
                                       static_cast<std::uint64_t>(client.id)});
      updates[i] = {local_update(result.global, client.combined, cfg.train, local),
                    client.combined.size()};
    });

    bool any_data = std::any_of(updates.begin(), updates.end(),
                                [](const ClientUpdate &u) { return u.sample_count > 0; });
    if (any_data) result.global = aggregate(updates);
    result.rounds.push_back(evaluate_round(t, result.global, world));
  }
  return result;
}

GeneralizationResult run_generalization(const std::vector<ClientState> &clients,
                                        const FedConfig &cfg, const World &world,
                                        RngStream stream) {
  return continue_generalization(clients, cfg, world,
                                 initial_global_params(world, cfg, stream), 0, stream);
}

PersonalizationResult run_personalization(const ModelParams &global,
                                          const std::vector<ClientState> &clients,
                                          const FedConfig &cfg, RngStream stream) {
  validate_fed_config(cfg);
  const std::size_t n = clients.size();
  PersonalizationResult out;
  out.params.assign(n, global);
  out.initial_accuracy.assign(n, std::nullopt);
  out.best_accuracy.assign(n, std::nullopt);

  TrainConfig one_epoch = cfg.train;
  one_epoch.local_epochs = 1;

  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const ClientState &client = clients[i];
    if (client.local_test.empty()) return;
    double acc = accuracy(global, client.local_test);
    out.initial_accuracy[i] = acc;
    double best = acc;
    if (!client.combined.empty()) {
      ModelParams current = global;
      for (int epoch = 0; epoch < cfg.pers_epochs; ++epoch) {
        current = local_update(current, client.combined, one_epoch,
                               stream.derive({tag(StreamTag::kPersonalization),
                                              static_cast<std::uint64_t>(client.id),
                                              static_cast<std::uint64_t>(epoch)}));
        best = std::max(best, accuracy(current, client.local_test));
      }
      out.params[i] = std::move(current);
    }
    out.best_accuracy[i] = best;
  });

  double sum_initial = 0.0, sum_best = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.best_accuracy[i]) {
      out.excluded.push_back(clients[i].id);
      continue;
    }
    sum_initial += *out.initial_accuracy[i];
    sum_best += *out.best_accuracy[i];
    ++counted;
  }
  if (counted > 0) {
    out.mean_initial = sum_initial / static_cast<double>(counted);
    out.mean_best = sum_best / static_cast<double>(counted);
  }
  return out;
}

ModelParams train_centralized(const World &world, const FedConfig &cfg, RngStream stream) {
  validate_fed_config(cfg);
  TrainConfig total = cfg.train;
  total.local_epochs = cfg.rounds * cfg.train.local_epochs;
  return local_update(initial_global_params(world, cfg, stream), world.train_pool, total,
                      stream.derive({tag(StreamTag::kCentralized)}));
}

}  // namespace fedsynth
