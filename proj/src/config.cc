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

#include "fedsynth/config.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

namespace {

std::string trim(std::string_view s) {
  const char *ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

double as_real(const std::string &key, const std::string &value) {
  try {
    double v = parse_double(value);
    if (!std::isfinite(v)) throw InvalidArgument("not finite");
    return v;
  } catch (const InvalidArgument &) {
    throw ConfigError(key, "expected a real number, got '" + value + "'");
  }
}

long long as_int(const std::string &key, const std::string &value) {
  try {
    return parse_integer(value);
  } catch (const InvalidArgument &) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

std::uint64_t as_seed(const std::string &key, const std::string &value) {
  long long v = as_int(key, value);
  if (v < 0) throw ConfigError(key, "seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

int as_positive_int(const std::string &key, const std::string &value, int minimum) {
  long long v = as_int(key, value);
  if (v < minimum || v > 100000000) {
    throw ConfigError(key, "must be an integer >= " + std::to_string(minimum));
  }
  return static_cast<int>(v);
}

std::size_t as_count(const std::string &key, const std::string &value) {
  long long v = as_int(key, value);
  if (v < 0) throw ConfigError(key, "must be >= 0");
  return static_cast<std::size_t>(v);
}

bool as_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

}  // namespace

std::string partition_mode_name(PartitionMode mode) {
  switch (mode) {
    case PartitionMode::kDirichlet:
      return "dirichlet";
    case PartitionMode::kSingleLabel:
      return "single-label";
    case PartitionMode::kIid:
      return "iid";
  }
  return "dirichlet";
}

int ExperimentConfig::effective_clients() const {
  return partition_mode == PartitionMode::kSingleLabel ? world.class_count : clients;
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig &cfg) {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("seed", std::to_string(cfg.seed));
  if (cfg.world_seed) e.emplace_back("world_seed", std::to_string(*cfg.world_seed));
  const WorldParams &w = cfg.world;
  e.emplace_back("world.preset", cfg.world_preset);
  e.emplace_back("world.classes", std::to_string(w.class_count));
  e.emplace_back("world.dim", std::to_string(w.dim));
  e.emplace_back("world.separation", format_double(w.separation));
  e.emplace_back("world.center", format_double(w.center));
  e.emplace_back("world.std_min", format_double(w.std_min));
  e.emplace_back("world.std_max", format_double(w.std_max));
  e.emplace_back("world.gap_scale", format_double(w.gap_scale));
  e.emplace_back("world.gap_shift", format_double(w.gap_shift));
  e.emplace_back("world.n_train", std::to_string(w.n_train));
  e.emplace_back("world.n_test", std::to_string(w.n_test));
  e.emplace_back("world.n_foundation", std::to_string(w.n_foundation));
  e.emplace_back("partition.mode", partition_mode_name(cfg.partition_mode));
  e.emplace_back("partition.beta", format_double(cfg.beta));
  e.emplace_back("partition.clients", std::to_string(cfg.clients));
  e.emplace_back("partition.rho", format_double(cfg.rho));
  e.emplace_back("partition.strict", bool_text(cfg.strict_nonempty));
  const FedConfig &f = cfg.fed;
  e.emplace_back("federation.rounds", std::to_string(f.rounds));
  e.emplace_back("federation.fraction", format_double(f.fraction));
  e.emplace_back("federation.strategy", strategy_name(f.strategy));
  e.emplace_back("federation.target_per_class", std::to_string(f.target_per_class));
  e.emplace_back("federation.alpha", format_double(f.alpha));
  e.emplace_back("federation.pers_epochs", std::to_string(f.pers_epochs));
  e.emplace_back("federation.workers", std::to_string(f.workers));
  e.emplace_back("train.lr", format_double(f.train.learning_rate));
  e.emplace_back("train.batch", std::to_string(f.train.batch_size));
  e.emplace_back("train.local_epochs", std::to_string(f.train.local_epochs));
  e.emplace_back("train.shuffle", bool_text(f.train.shuffle));
  e.emplace_back("train.arch", arch_name(f.arch));
  e.emplace_back("train.hidden", std::to_string(f.hidden));
  e.emplace_back("output.dir", cfg.output_dir);
  return e;
}

void apply_config_entry(ExperimentConfig &cfg, const std::string &key,
                        const std::string &value) {
  WorldParams &w = cfg.world;
  FedConfig &f = cfg.fed;
  if (key == "seed") {
    cfg.seed = as_seed(key, value);
  } else if (key == "world_seed") {
    cfg.world_seed = as_seed(key, value);
  } else if (key == "world.preset") {
    try {
      w = preset_params(value);
    } catch (const InvalidArgument &) {
      throw ConfigError(key, "unknown preset '" + value + "'");
    }
    cfg.world_preset = value;
  } else if (key == "world.classes") {
    w.class_count = as_positive_int(key, value, 1);
  } else if (key == "world.dim") {
    w.dim = as_positive_int(key, value, 1);
  } else if (key == "world.separation") {
    w.separation = as_real(key, value);
  } else if (key == "world.center") {
    w.center = as_real(key, value);
  } else if (key == "world.std_min") {
    w.std_min = as_real(key, value);
  } else if (key == "world.std_max") {
    w.std_max = as_real(key, value);
  } else if (key == "world.gap_scale") {
    w.gap_scale = as_real(key, value);
  } else if (key == "world.gap_shift") {
    w.gap_shift = as_real(key, value);
  } else if (key == "world.n_train") {
    w.n_train = as_count(key, value);
  } else if (key == "world.n_test") {
    w.n_test = as_count(key, value);
  } else if (key == "world.n_foundation") {
    w.n_foundation = as_count(key, value);
  } else if (key == "partition.mode") {
    if (value == "dirichlet") {
      cfg.partition_mode = PartitionMode::kDirichlet;
    } else if (value == "single-label") {
      cfg.partition_mode = PartitionMode::kSingleLabel;
    } else if (value == "iid") {
      cfg.partition_mode = PartitionMode::kIid;
    } else {
      throw ConfigError(key, "expected dirichlet, single-label or iid, got '" + value + "'");
    }
  } else if (key == "partition.beta") {
    cfg.beta = as_real(key, value);
  } else if (key == "partition.clients") {
    cfg.clients = as_positive_int(key, value, 1);
  } else if (key == "partition.rho") {
    cfg.rho = as_real(key, value);
  } else if (key == "partition.strict") {
    cfg.strict_nonempty = as_bool(key, value);
  } else if (key == "federation.rounds") {
    f.rounds = as_positive_int(key, value, 1);
  } else if (key == "federation.fraction") {
    f.fraction = as_real(key, value);
  } else if (key == "federation.strategy") {
    try {
      f.strategy = parse_strategy(value);
    } catch (const InvalidArgument &) {
      throw ConfigError(key, "expected none, regl-tf or regl-ft, got '" + value + "'");
    }
  } else if (key == "federation.target_per_class") {
    f.target_per_class = as_count(key, value);
  } else if (key == "federation.alpha") {
    f.alpha = as_real(key, value);
  } else if (key == "federation.pers_epochs") {
    f.pers_epochs = as_positive_int(key, value, 0);
  } else if (key == "federation.workers") {
    f.workers = as_positive_int(key, value, 1);
  } else if (key == "train.lr") {
    f.train.learning_rate = as_real(key, value);
  } else if (key == "train.batch") {
    f.train.batch_size = static_cast<std::size_t>(as_positive_int(key, value, 1));
  } else if (key == "train.local_epochs") {
    f.train.local_epochs = as_positive_int(key, value, 1);
  } else if (key == "train.shuffle") {
    f.train.shuffle = as_bool(key, value);
  } else if (key == "train.arch") {
    try {
      f.arch = parse_arch(value);
    } catch (const InvalidArgument &) {
      throw ConfigError(key, "expected softmax or mlp1, got '" + value + "'");
    }
  } else if (key == "train.hidden") {
    f.hidden = as_positive_int(key, value, 1);
  } else if (key == "output.dir") {
    if (value.empty()) throw ConfigError(key, "must not be empty");
    cfg.output_dir = value;
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

void validate_config(const ExperimentConfig &cfg) {
  const WorldParams &w = cfg.world;
  if (!(w.separation > 0.0)) throw ConfigError("world.separation", "must be > 0");
  if (!(w.std_min > 0.0)) throw ConfigError("world.std_min", "must be > 0");
  if (w.std_max < w.std_min) throw ConfigError("world.std_max", "must be >= world.std_min");
  if (!(w.gap_scale > 0.0)) throw ConfigError("world.gap_scale", "must be > 0");
  const auto classes = static_cast<std::size_t>(w.class_count);
  if (w.n_train < classes) throw ConfigError("world.n_train", "must be >= world.classes");
  if (w.n_test < classes) throw ConfigError("world.n_test", "must be >= world.classes");
  if (w.n_foundation < 2 * classes) {
    throw ConfigError("world.n_foundation", "need at least 2 samples per class");
  }
  if (cfg.partition_mode == PartitionMode::kDirichlet && !(cfg.beta > 0.0)) {
    throw ConfigError("partition.beta", "must be > 0");
  }
  if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw ConfigError("partition.rho", "must lie in [0, 1]");
  const FedConfig &f = cfg.fed;
  if (!(f.fraction > 0.0 && f.fraction <= 1.0)) {
    throw ConfigError("federation.fraction", "must lie in (0, 1]");
  }
  if (!(f.alpha >= 0.0 && f.alpha <= 1.0)) throw ConfigError("federation.alpha", "must lie in [0, 1]");
  if (!(f.train.learning_rate > 0.0)) throw ConfigError("train.lr", "must be > 0");
}

ExperimentConfig parse_config(std::istream &in) {
  // Preset first so explicit world keys override it regardless of order.
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, int> seen;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no), "malformed section header");
      }
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = trim(std::string_view(text).substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;
    if (seen[full]++ > 0) throw ConfigError(full, "duplicate key");
    entries.emplace_back(std::move(full), std::move(value));
  }
  ExperimentConfig cfg;
  for (const auto &[k, v] : entries) {
    if (k == "world.preset") apply_config_entry(cfg, k, v);
  }
  for (const auto &[k, v] : entries) {
    if (k != "world.preset") apply_config_entry(cfg, k, v);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream &out, const ExperimentConfig &cfg) {
  std::string current;
  for (const auto &[key, value] : config_entries(cfg)) {
    auto dot = key.find('.');
    std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (section != current) {
      out << "\n[" << section << "]\n";
      current = section;
    }
    out << name << " = " << value << '\n';
  }
}

std::string sweep_axis_key(const std::string &axis) {
  static const std::map<std::string, std::string> kAxes = {
      {"beta", "partition.beta"},
      {"partition.beta", "partition.beta"},
      {"rho", "partition.rho"},
      {"partition.rho", "partition.rho"},
      {"M", "partition.clients"},
      {"clients", "partition.clients"},
      {"partition.clients", "partition.clients"},
      {"E_local", "train.local_epochs"},
      {"local_epochs", "train.local_epochs"},
      {"train.local_epochs", "train.local_epochs"},
      {"target", "federation.target_per_class"},
      {"target_per_class", "federation.target_per_class"},
      {"federation.target_per_class", "federation.target_per_class"},
      {"alpha", "federation.alpha"},
      {"federation.alpha", "federation.alpha"},
  };
  auto it = kAxes.find(axis);
  if (it == kAxes.end()) throw ConfigError("--axis", "'" + axis + "' is not a sweepable key");
  return it->second;
}

}  // namespace fedsynth
