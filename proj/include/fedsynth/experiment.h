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

#ifndef FEDSYNTH_EXPERIMENT_H_
#define FEDSYNTH_EXPERIMENT_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedsynth/config.h"
#include "fedsynth/federation.h"
#include "fedsynth/partition.h"
#include "fedsynth/worldgen.h"

namespace fedsynth {

// World, partition (with injection and mirrored test split) for a config.
struct Setup {
  World world;
  Partition partition;
};

Setup build_setup(const ExperimentConfig &cfg);

struct ExperimentResult {
  ExperimentConfig config;
  Partition partition;
  GeneralizationResult generalization;
  PersonalizationResult personalization;
  std::vector<std::size_t> real_counts;
  std::vector<std::size_t> synthetic_counts;
  std::vector<std::optional<double>> w2_foundation;
  std::vector<std::optional<double>> w2_adapted;
  bool accuracy_trend_nondecreasing = false;
  double wall_seconds = 0.0;

  double final_accuracy() const { return generalization.rounds.back().global_accuracy; }
};

// Algorithm end to end: world, partition, client preparation, FedAvg rounds,
// personalization.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

// True when the `window`-round moving average of global accuracy never
// decreases over the first half of the run.
bool moving_average_nondecreasing(const std::vector<RoundRecord> &rounds,
                                  std::size_t window = 10);

// rounds.csv: round,global_accuracy,class_0..class_{C-1}
void write_rounds(std::ostream &out, const std::vector<RoundRecord> &rounds, int classes);
// summary.csv: key,value rows, ending with config.* echo rows. The echo
// leaves out output.dir and federation.workers, which never affect results.
void write_summary(std::ostream &out, const ExperimentResult &result);
// Rebuilds the config from the config.* rows of a summary file.
ExperimentConfig config_from_summary(std::istream &in);

// Writes rounds.csv, summary.csv, partition.csv, assignment.csv and
// timing.csv (wall time, the only non-deterministic output) into `dir`.
void write_run_outputs(const ExperimentResult &result, const std::string &dir);

// Writes the partition heatmap table for a config.
void write_partition_report(const ExperimentConfig &cfg, const std::string &path);

// Materializes the world: world_spec.csv, train.csv, test.csv, foundation.csv.
void write_world(const ExperimentConfig &cfg, const std::string &dir);

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  double final_accuracy = 0.0;
  std::optional<double> mean_personalized;
  std::optional<double> mean_global_local;
};

// One run per value. Value i runs with seed derive_seed(root, {sweep, i})
// on the world of the root seed. For the beta axis the value "iid" switches
// the partition mode instead.
std::vector<SweepRow> run_sweep(const ExperimentConfig &base, const std::string &axis,
                                const std::vector<std::string> &values,
                                const std::string &out_dir = "");
void write_sweep_table(std::ostream &out, const std::string &axis_key,
                       const std::vector<SweepRow> &rows);
// Config for value i of a sweep (seed and axis value applied).
ExperimentConfig sweep_config(const ExperimentConfig &base, const std::string &axis_key,
                              const std::string &value, std::size_t index);

}  // namespace fedsynth

#endif  // FEDSYNTH_EXPERIMENT_H_
