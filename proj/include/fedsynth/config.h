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

#ifndef FEDSYNTH_CONFIG_H_
#define FEDSYNTH_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fedsynth/federation.h"
#include "fedsynth/worldgen.h"

namespace fedsynth {

enum class PartitionMode { kDirichlet, kSingleLabel, kIid };

std::string partition_mode_name(PartitionMode mode);

// Everything one simulation run depends on.
//
// Text form is "key = value" lines grouped under [world], [partition],
// [federation], [train] and [output] sections; `seed` (and optionally
// `world_seed`) live above the first section. '#' starts a comment.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  // Seed for the world only; defaults to `seed`. Sweeps pin it so every
  // value runs on the same world.
  std::optional<std::uint64_t> world_seed;
  std::string world_preset = "small10";
  WorldParams world = preset_params("small10");
  PartitionMode partition_mode = PartitionMode::kDirichlet;
  double beta = 0.5;
  bool strict_nonempty = false;
  double rho = 0.0;
  int clients = 5;
  FedConfig fed;
  std::string output_dir = "out";

  std::uint64_t effective_world_seed() const { return world_seed.value_or(seed); }
  // Clients actually simulated (single-label forces one per class).
  int effective_clients() const;
  bool operator==(const ExperimentConfig &) const = default;
};

// Ordered (section.key, value) pairs describing a config. Round-trips through
// apply_config_entry.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig &cfg);

// Sets one "section.key" (or top-level key). Throws ConfigError naming the
// key on unknown keys or invalid values.
void apply_config_entry(ExperimentConfig &cfg, const std::string &key,
                        const std::string &value);

// Throws ConfigError for cross-field violations.
void validate_config(const ExperimentConfig &cfg);

ExperimentConfig parse_config(std::istream &in);
ExperimentConfig load_config(const std::string &path);
void write_config(std::ostream &out, const ExperimentConfig &cfg);

// Canonical key for a sweep axis name, e.g. "beta" -> "partition.beta".
// Throws ConfigError for keys that cannot be swept.
std::string sweep_axis_key(const std::string &axis);

}  // namespace fedsynth

#endif  // FEDSYNTH_CONFIG_H_
