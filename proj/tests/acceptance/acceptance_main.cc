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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   fedsynth_acceptance           run every criterion
//   fedsynth_acceptance 5 7       run only the listed criteria
//
// Exit status is 0 only if every selected criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fedsynth/config.h"
#include "fedsynth/experiment.h"
#include "fedsynth/federation.h"
#include "fedsynth/genmodel.h"
#include "fedsynth/learner.h"
#include "fedsynth/metrics.h"
#include "fedsynth/partition.h"
#include "fedsynth/worldgen.h"

#ifndef FEDSYNTH_CLI_PATH
#error "FEDSYNTH_CLI_PATH must point at the fedsynth binary"
#endif

namespace fs = std::filesystem;
using namespace fedsynth;

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double mean(const std::vector<double> &v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string list(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "/" : "") + fmt(v[i], 3);
  return out;
}

// ---------------------------------------------------------------------------
// 1. Analytic gradients agree with central finite differences.

Verdict gradient_correctness() {
  RngStream s(2026, {tag(StreamTag::kUser), 1});
  double worst = 0.0;
  int instances = 0;
  for (Arch arch : {Arch::kSoftmax, Arch::kMlp1}) {
    for (int t = 0; t < 50; ++t, ++instances) {
      const int d = 1 + static_cast<int>(s.uniform_index(8));
      const int c = 2 + static_cast<int>(s.uniform_index(4));
      const int n = 1 + static_cast<int>(s.uniform_index(10));
      const int h = 1 + static_cast<int>(s.uniform_index(6));
      ModelParams p = init_params(arch, d, c, h, s.derive({static_cast<std::uint64_t>(instances)}));
      for (double &v : p.values) v = 0.5 * s.normal();
      Dataset batch(c, d);
      for (int i = 0; i < n; ++i) {
        batch.add(standard_normal_vector(s, static_cast<std::size_t>(d)),
                  static_cast<int>(s.uniform_index(static_cast<std::uint64_t>(c))));
      }
      const Vector g = gradient(p, batch);
      const double step = 1e-5;
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        ModelParams plus = p, minus = p;
        plus.values[i] += step;
        minus.values[i] -= step;
        const double fd = (ce_loss(plus, batch) - ce_loss(minus, batch)) / (2 * step);
        const double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-8});
        worst = std::max(worst, std::abs(fd - g[i]) / denom);
      }
    }
  }
  return {worst < 1e-4, "max relative error " + std::to_string(worst) + " over " +
                            std::to_string(instances) + " instances (limit 1e-4)"};
}

// ---------------------------------------------------------------------------
// 2. Aggregation against an independently written weighted mean.

Verdict aggregation_oracle() {
  RngStream s(2026, {tag(StreamTag::kUser), 2});
  double worst = 0.0;
  int with_empty = 0;
  for (int t = 0; t < 100; ++t) {
    const int clients = 1 + static_cast<int>(s.uniform_index(8));
    const int len = 1 + static_cast<int>(s.uniform_index(40));
    std::vector<ClientUpdate> updates;
    bool has_empty = false;
    for (int m = 0; m < clients; ++m) {
      ClientUpdate u;
      u.params = ModelParams{Arch::kSoftmax, 1, 1, 0, Vector(static_cast<std::size_t>(len))};
      for (double &v : u.params.values) v = 3.0 * s.normal();
      // Roughly a third of clients carry no samples.
      u.sample_count = s.uniform_index(3) == 0 ? 0 : 1 + s.uniform_index(1000);
      has_empty |= u.sample_count == 0;
      updates.push_back(std::move(u));
    }
    if (std::all_of(updates.begin(), updates.end(),
                    [](const ClientUpdate &u) { return u.sample_count == 0; })) {
      updates.front().sample_count = 1;
    }
    with_empty += has_empty;
    ModelParams got = aggregate(updates);
    // Oracle: numerator sum first, single division at the end.
    double total = 0;
    for (const auto &u : updates) total += static_cast<double>(u.sample_count);
    for (int i = 0; i < len; ++i) {
      long double num = 0;
      for (const auto &u : updates) {
        num += static_cast<long double>(u.sample_count) * u.params.values[static_cast<std::size_t>(i)];
      }
      const double want = static_cast<double>(num / total);
      worst = std::max(worst, std::abs(want - got.values[static_cast<std::size_t>(i)]));
    }
  }
  return {worst <= 1e-12, "max abs difference " + std::to_string(worst) + " (limit 1e-12), " +
                              std::to_string(with_empty) + "/100 instances had N_m = 0 clients"};
}

// ---------------------------------------------------------------------------
// 3. Dirichlet partition statistics.

Verdict dirichlet_statistics() {
  const World world = default_world("small10", 1);
  const Dataset &pool = world.train_pool;
  const auto per_class = pool.label_histogram();
  bool conserved = true;
  double share_sum = 0.0;
  std::size_t share_n = 0;
  double worst_dev = 0.0;
  for (double beta : {0.01, 1000.0}) {
    for (std::uint64_t draw = 0; draw < 1000; ++draw) {
      Partition p = dirichlet_partition(pool, 5, beta,
                                        RngStream(draw, {tag(StreamTag::kPartition)}));
      for (int k = 0; k < pool.class_count(); ++k) {
        std::size_t sum = 0, top = 0;
        for (const auto &h : p.histograms) {
          sum += h[static_cast<std::size_t>(k)];
          top = std::max(top, h[static_cast<std::size_t>(k)]);
          if (beta > 1.0) {
            const double share = static_cast<double>(h[static_cast<std::size_t>(k)]) /
                                 static_cast<double>(per_class[static_cast<std::size_t>(k)]);
            worst_dev = std::max(worst_dev, std::abs(share - 0.2));
          }
        }
        conserved &= sum == per_class[static_cast<std::size_t>(k)];
        if (beta < 1.0) {
          share_sum += static_cast<double>(top) / static_cast<double>(per_class[static_cast<std::size_t>(k)]);
          ++share_n;
        }
      }
    }
  }
  const double mean_max = share_sum / static_cast<double>(share_n);
  const bool pass = conserved && mean_max > 0.90 && worst_dev < 0.05;
  return {pass, std::string("counts conserved: ") + (conserved ? "yes" : "NO") +
                    "; beta=0.01 mean max-client-share " + fmt(mean_max) +
                    " (> 0.90); beta=1000 max deviation from uniform " + fmt(worst_dev) +
                    " (< 0.05)"};
}

// ---------------------------------------------------------------------------
// 4. Distribution recovery of the adapted generator.

struct RecoveryCheck {
  int qualifying = 0;
  int ratio_failures = 0;
  double worst_ratio = 0.0;
  int blend_failures = 0;
  int clients = 0;
  std::string blend_notes;
};

RecoveryCheck recovery(const ExperimentConfig &cfg) {
  Setup setup = build_setup(cfg);
  const Generator foundation = fit_foundation(setup.world.foundation_pool);
  const double w2_foundation = w2_to_global(foundation, setup.world.spec).mean;
  RecoveryCheck out;
  for (int m = 0; m < setup.partition.client_count; ++m) {
    ++out.clients;
    const Dataset real = setup.world.train_pool.subset(setup.partition.client_train_indices(m));
    const auto hist = real.label_histogram();
    const std::size_t largest = hist.empty() ? 0 : *std::max_element(hist.begin(), hist.end());
    std::optional<GapEstimate> gap;
    if (largest >= 2) gap = estimate_gap(foundation, real);

    if (largest >= 500) {
      ++out.qualifying;
      const double ratio = w2_to_global(adapt(foundation, *gap, 1.0), setup.world.spec).mean /
                           w2_foundation;
      out.worst_ratio = std::max(out.worst_ratio, ratio);
      out.ratio_failures += !(ratio < 0.25);
    }
    const double adapted = gap ? w2_to_global(adapt(foundation, *gap, cfg.fed.alpha),
                                              setup.world.spec).mean
                               : w2_foundation;
    if (!(adapted < w2_foundation)) {
      ++out.blend_failures;
      out.blend_notes += " client " + std::to_string(m) + " (" + std::to_string(real.size()) +
                         " samples)";
    }
  }
  return out;
}

Verdict distribution_recovery() {
  ExperimentConfig cfg;
  cfg.beta = 0.01;
  cfg.clients = 5;
  RecoveryCheck preset = recovery(cfg);
  // The preset holds 200 samples per class, so no client can reach 500 in a
  // class; repeat the alpha = 1 clause on a larger train pool where it binds.
  ExperimentConfig large = cfg;
  large.world.n_train = 10000;
  RecoveryCheck big = recovery(large);
  const bool pass = preset.ratio_failures == 0 && preset.blend_failures == 0 &&
                    big.qualifying > 0 && big.ratio_failures == 0;
  std::string detail =
      "small10: " + std::to_string(preset.qualifying) + " clients with >=500 in a class; alpha=0.8 W2 < foundation for " +
      std::to_string(preset.clients - preset.blend_failures) + "/" + std::to_string(preset.clients) +
      " clients" + preset.blend_notes + ". n_train=10000: " + std::to_string(big.qualifying) +
      " qualifying clients, worst alpha=1 W2 ratio " + fmt(big.worst_ratio) + " (< 0.25)";
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 5. Main ordering: centralized >= regl-ft > regl-tf > none.

ExperimentConfig main_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.beta = 0.01;
  cfg.clients = 5;
  cfg.fed.rounds = 100;
  cfg.fed.train.local_epochs = 5;
  cfg.fed.target_per_class = 200;
  cfg.fed.pers_epochs = 0;
  return cfg;
}

Verdict main_ordering() {
  std::vector<double> cen, none, tf, ft;
  for (std::uint64_t seed : kSeeds) {
    ExperimentConfig cfg = main_config(seed);
    Setup setup = build_setup(cfg);
    cen.push_back(accuracy(train_centralized(setup.world, cfg.fed, RngStream(seed, {})),
                           setup.world.test_pool));
    for (auto [strategy, sink] : {std::pair{Strategy::kNone, &none},
                                  std::pair{Strategy::kReglTf, &tf},
                                  std::pair{Strategy::kReglFt, &ft}}) {
      cfg.fed.strategy = strategy;
      sink->push_back(run_experiment(cfg).final_accuracy());
    }
  }
  const double c = mean(cen), n = mean(none), t = mean(tf), f = mean(ft);
  const bool order = c >= f && f > t && t > n;
  const bool close = c - f <= 0.03 && f - c <= 0.03;
  const bool gap = c - n >= 0.10;
  std::string detail = "means over seeds 1-3: centralized " + fmt(c) + " [" + list(cen) +
                       "], regl-ft " + fmt(f) + " [" + list(ft) + "], regl-tf " + fmt(t) + " [" +
                       list(tf) + "], none " + fmt(n) + " [" + list(none) + "]; ordering " +
                       (order ? "holds" : "VIOLATED") + ", |centralized - regl-ft| " +
                       fmt(std::abs(c - f)) + " (<= 0.03), centralized - none " + fmt(c - n) +
                       " (>= 0.10)";
  return {order && close && gap, detail};
}

// ---------------------------------------------------------------------------
// 6. Missing classes after one local update from the round-10 model.

Verdict missing_classes() {
  std::vector<double> fedavg_missing;
  double worst_drop = 0.0;
  for (std::uint64_t seed : kSeeds) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.partition_mode = PartitionMode::kSingleLabel;
    cfg.fed.rounds = 10;
    Setup setup = build_setup(cfg);
    const Generator foundation = fit_foundation(setup.world.foundation_pool);
    const RngStream root(seed, {});
    for (Strategy strategy : {Strategy::kNone, Strategy::kReglFt}) {
      cfg.fed.strategy = strategy;
      auto clients = prepare_clients(setup.world, setup.partition, cfg.fed, foundation, root);
      auto gen = run_generalization(clients, cfg.fed, setup.world, root);
      const double pre = accuracy(gen.global, setup.world.test_pool);
      double missing_sum = 0.0;
      for (const auto &client : clients) {
        RngStream local = root.derive({tag(StreamTag::kRound), 10, tag(StreamTag::kClient),
                                       static_cast<std::uint64_t>(client.id)});
        ModelParams after = local_update(gen.global, client.combined, cfg.fed.train, local);
        if (strategy == Strategy::kNone) {
          ClassAccuracy ca = class_accuracy(after, setup.world.test_pool);
          double sum = 0.0;
          int count = 0;
          for (int k = 0; k < static_cast<int>(ca.size()); ++k) {
            if (k == client.id || !ca[static_cast<std::size_t>(k)]) continue;
            sum += *ca[static_cast<std::size_t>(k)];
            ++count;
          }
          missing_sum += sum / count;
        } else {
          worst_drop = std::max(worst_drop, pre - accuracy(after, setup.world.test_pool));
        }
      }
      if (strategy == Strategy::kNone) {
        fedavg_missing.push_back(missing_sum / static_cast<double>(clients.size()));
      }
    }
  }
  const double miss = mean(fedavg_missing);
  return {miss < 0.05 && worst_drop <= 0.10,
          "FedAvg per-client missing-class accuracy " + fmt(miss) + " [" + list(fedavg_missing) +
              "] (< 0.05); regl-ft worst per-client drop from pre-update accuracy " +
              fmt(worst_drop) + " (<= 0.10)"};
}

// ---------------------------------------------------------------------------
// 7 and 8 run through the sweep harness, one sweep per root seed, and compare
// seed-averaged final accuracies.

std::vector<double> sweep_means(ExperimentConfig base, const std::string &axis,
                                const std::vector<std::string> &values) {
  std::vector<double> sums(values.size(), 0.0);
  for (std::uint64_t seed : kSeeds) {
    base.seed = seed;
    auto rows = run_sweep(base, axis, values);
    for (std::size_t i = 0; i < rows.size(); ++i) sums[i] += rows[i].final_accuracy;
  }
  for (double &s : sums) s /= static_cast<double>(std::size(kSeeds));
  return sums;
}

Verdict injection_trend() {
  ExperimentConfig base;
  base.beta = 0.01;
  base.fed.strategy = Strategy::kNone;
  base.fed.pers_epochs = 0;
  const std::vector<std::string> rhos{"0", "0.05", "0.10", "0.20", "0.30"};
  auto acc = sweep_means(base, "rho", rhos);
  bool increasing = true;
  for (std::size_t i = 1; i < acc.size(); ++i) increasing &= acc[i] > acc[i - 1];
  std::string detail = "mean final accuracy by rho";
  for (std::size_t i = 0; i < acc.size(); ++i) detail += " " + rhos[i] + ":" + fmt(acc[i]);
  return {increasing, detail + (increasing ? " (strictly increasing)" : " (NOT strictly increasing)")};
}

Verdict beta_robustness() {
  const std::vector<std::string> betas{"0.01", "0.5", "iid"};
  auto spread = [&](Strategy strategy, std::vector<double> &acc) {
    ExperimentConfig base;
    base.fed.strategy = strategy;
    base.fed.pers_epochs = 0;
    acc = sweep_means(base, "beta", betas);
    return *std::max_element(acc.begin(), acc.end()) - *std::min_element(acc.begin(), acc.end());
  };
  std::vector<double> ft, none;
  const double ft_spread = spread(Strategy::kReglFt, ft);
  const double none_spread = spread(Strategy::kNone, none);
  return {ft_spread < 0.05 && none_spread > 0.15,
          "regl-ft 0.01/0.5/iid " + list(ft) + " spread " + fmt(ft_spread) +
              " (< 0.05); none " + list(none) + " spread " + fmt(none_spread) + " (> 0.15)"};
}

// ---------------------------------------------------------------------------
// 9. Personalization builds on the global model.

Verdict personalization() {
  bool pass = true;
  std::string detail;
  for (Strategy strategy : {Strategy::kReglTf, Strategy::kReglFt}) {
    std::vector<double> best, initial;
    for (std::uint64_t seed : kSeeds) {
      ExperimentConfig cfg = main_config(seed);
      cfg.fed.strategy = strategy;
      cfg.fed.pers_epochs = FedConfig{}.pers_epochs;
      auto r = run_experiment(cfg);
      best.push_back(r.personalization.mean_best.value_or(NAN));
      initial.push_back(r.personalization.mean_initial.value_or(NAN));
      pass &= best.back() >= initial.back();
    }
    detail += strategy_name(strategy) + ": personalized " + list(best) + " vs global " +
              list(initial) + "; ";
  }
  return {pass, detail + "per-seed personalized >= global"};
}

// ---------------------------------------------------------------------------
// 10. Byte-identical outputs across invocations and worker counts.

int run_cli(const std::string &args) {
  const std::string cmd = std::string(FEDSYNTH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "fedsynth_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg = (dir / "run.ini").string();
  std::ofstream(cfg) << "seed = 11\n[partition]\nbeta = 0.01\n[federation]\nrounds = 30\n"
                        "pers_epochs = 10\n";
  const std::string base = "run --config " + cfg + " --out ";
  const int a = run_cli(base + (dir / "a").string());
  const int b = run_cli(base + (dir / "b").string());
  const int c = run_cli(base + (dir / "c").string() + " --workers 4");
  if (a != 0 || b != 0 || c != 0) return {false, "fedsynth run exited non-zero"};
  int compared = 0;
  std::string mismatched;
  for (const auto &entry : fs::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    if (name == "timing.csv") continue;
    const std::string ref = slurp(entry.path());
    if (ref != slurp(dir / "b" / name)) mismatched += " " + name.string() + "(repeat)";
    if (ref != slurp(dir / "c" / name)) mismatched += " " + name.string() + "(workers=4)";
    ++compared;
  }
  fs::remove_all(dir);
  return {compared >= 4 && mismatched.empty(),
          std::to_string(compared) + " output files compared across repeat and workers=1/4" +
              (mismatched.empty() ? ", all byte-identical" : "; differing:" + mismatched)};
}

struct Criterion {
  int id;
  const char *name;
  std::function<Verdict()> check;
  double limit_seconds;  // 0 when no runtime bound is stated
};

}  // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradient_correctness, 5.0},
      {2, "aggregation oracle", aggregation_oracle, 0.0},
      {3, "dirichlet partition statistics", dirichlet_statistics, 10.0},
      {4, "distribution recovery", distribution_recovery, 30.0},
      {5, "main directional reproduction", main_ordering, 180.0},
      {6, "missing-class reproduction", missing_classes, 0.0},
      {7, "injection trend", injection_trend, 0.0},
      {8, "beta robustness", beta_robustness, 0.0},
      {9, "personalization", personalization, 0.0},
      {10, "determinism", determinism, 0.0},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto &c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      v.pass = false;
      v.detail += "; runtime limit " + fmt(c.limit_seconds, 0) + " s exceeded";
    }
    failures += !v.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
