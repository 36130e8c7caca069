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

// fedsynth command line: run, sweep, partition-report, world-gen.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/numerical error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedsynth/config.h"
#include "fedsynth/error.h"
#include "fedsynth/experiment.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> workers;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file")->required();
  cmd->add_option("--seed", opts.seed, "Override the config seed");
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides output.dir)");
  cmd->add_option("--workers", opts.workers, "Threads for the client stage");
}

fedsynth::ExperimentConfig resolve(const CommonOptions &opts) {
  fedsynth::ExperimentConfig cfg = fedsynth::load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.workers) {
    if (*opts.workers < 1) throw fedsynth::ConfigError("--workers", "must be >= 1");
    cfg.fed.workers = *opts.workers;
  }
  return cfg;
}

std::vector<std::string> split_values(const std::string &csv) {
  std::vector<std::string> out;
  for (auto field : fedsynth::split_fields(csv)) {
    if (!field.empty()) out.emplace_back(field);
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"fedsynth: federated learning simulator with generative label-skew recovery"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, report_opts, world_opts;
  auto *run = app.add_subcommand("run", "Run one experiment and write its outputs");
  add_common(run, run_opts);

  auto *sweep = app.add_subcommand("sweep", "Run one experiment per value of an axis");
  add_common(sweep, sweep_opts);
  std::string axis, values;
  sweep->add_option("--axis", axis, "Axis key: beta, rho, E_local, M, target, alpha")
      ->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->required();

  auto *report = app.add_subcommand("partition-report", "Write the label histogram table");
  add_common(report, report_opts);

  auto *world_gen = app.add_subcommand("world-gen", "Materialize and serialize the world");
  add_common(world_gen, world_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = resolve(run_opts);
      auto result = fedsynth::run_experiment(cfg);
      fedsynth::write_run_outputs(result, cfg.output_dir);
      std::cout << "final_global_accuracy " << fedsynth::format_double(result.final_accuracy())
                << "\noutputs " << cfg.output_dir << '\n';
    } else if (*sweep) {
      auto cfg = resolve(sweep_opts);
      auto rows = fedsynth::run_sweep(cfg, axis, split_values(values), cfg.output_dir);
      fedsynth::write_sweep_table(std::cout, fedsynth::sweep_axis_key(axis), rows);
    } else if (*report) {
      auto cfg = resolve(report_opts);
      auto path = (std::filesystem::path(cfg.output_dir) / "partition.csv").string();
      fedsynth::write_partition_report(cfg, path);
      std::cout << path << '\n';
    } else if (*world_gen) {
      auto cfg = resolve(world_opts);
      fedsynth::write_world(cfg, cfg.output_dir);
      std::cout << cfg.output_dir << '\n';
    }
  } catch (const fedsynth::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fedsynth::NumericalError &e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
