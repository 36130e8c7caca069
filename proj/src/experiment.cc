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

#include "fedsynth/experiment.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "fedsynth/error.h"
#include "fedsynth/genmodel.h"
#include "fedsynth/metrics.h"

namespace fedsynth {

namespace {

std::string cell(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string(kUndefinedCell);
}

std::ofstream open_output(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open for writing: " + path.string());
  return out;
}

RngStream root_stream(const ExperimentConfig &cfg) { return RngStream(cfg.seed, {}); }

}  // namespace

Setup build_setup(const ExperimentConfig &cfg) {
  validate_config(cfg);
  World world = make_world(cfg.world, cfg.effective_world_seed());
  RngStream root = root_stream(cfg);
  RngStream part_stream = root.derive({tag(StreamTag::kPartition)});
  Partition part;
  switch (cfg.partition_mode) {
    case PartitionMode::kDirichlet:
      part = dirichlet_partition(world.train_pool, cfg.clients, cfg.beta, part_stream,
                                 DirichletOptions{cfg.strict_nonempty});
      break;
    case PartitionMode::kSingleLabel:
      part = single_label_partition(world.train_pool, part_stream);
      break;
    case PartitionMode::kIid:
      part = iid_partition(world.train_pool, cfg.clients, part_stream);
      break;
  }
  part = inject_global_fraction(part, world.train_pool, cfg.rho,
                                root.derive({tag(StreamTag::kInjection)}));
  part = mirror_test_split(part, world.test_pool, root.derive({tag(StreamTag::kMirror)}));
  return Setup{std::move(world), std::move(part)};
}

bool moving_average_nondecreasing(const std::vector<RoundRecord> &rounds,
                                  std::size_t window) {
  const std::size_t half = rounds.size() / 2;
  if (half < window + 1) return true;
  double prev = 0.0;
  for (std::size_t end = window; end <= half; ++end) {
    double avg = 0.0;
    for (std::size_t i = end - window; i < end; ++i) avg += rounds[i].global_accuracy;
    avg /= static_cast<double>(window);
    if (end > window && avg < prev) return false;
    prev = avg;
  }
  return true;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
  const auto started = std::chrono::steady_clock::now();
  Setup setup = build_setup(cfg);
  RngStream root = root_stream(cfg);

  Generator foundation = fit_foundation(setup.world.foundation_pool);
  std::vector<ClientState> clients =
      prepare_clients(setup.world, setup.partition, cfg.fed, foundation, root);

  ExperimentResult result;
  result.config = cfg;
  result.generalization = run_generalization(clients, cfg.fed, setup.world, root);
  result.personalization =
      run_personalization(result.generalization.global, clients, cfg.fed, root);
  for (const auto &c : clients) {
    result.real_counts.push_back(c.real.size());
    result.synthetic_counts.push_back(c.synthetic.size());
    result.w2_foundation.push_back(c.w2_foundation);
    result.w2_adapted.push_back(c.w2_adapted);
  }
  result.accuracy_trend_nondecreasing =
      moving_average_nondecreasing(result.generalization.rounds);
  result.partition = std::move(setup.partition);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

void write_rounds(std::ostream &out, const std::vector<RoundRecord> &rounds, int classes) {
  out << "round,global_accuracy";
  for (int c = 0; c < classes; ++c) out << ",class_" << c;
  out << '\n';
  for (const auto &r : rounds) {
    out << r.round << ',' << format_double(r.global_accuracy);
    for (const auto &a : r.class_accuracy) out << ',' << cell(a);
    out << '\n';
  }
}

void write_summary(std::ostream &out, const ExperimentResult &result) {
  const ExperimentConfig &cfg = result.config;
  const PersonalizationResult &pers = result.personalization;
  out << "key,value\n";
  out << "seed," << cfg.seed << '\n';
  out << "strategy," << strategy_name(cfg.fed.strategy) << '\n';
  out << "clients," << result.real_counts.size() << '\n';
  out << "rounds," << result.generalization.rounds.size() << '\n';
  out << "final_global_accuracy," << format_double(result.final_accuracy()) << '\n';
  out << "mean_personalized_accuracy," << cell(pers.mean_best) << '\n';
  out << "mean_global_local_accuracy," << cell(pers.mean_initial) << '\n';
  out << "personalization_excluded," << pers.excluded.size() << '\n';
  out << "accuracy_trend_nondecreasing,"
      << (result.accuracy_trend_nondecreasing ? "true" : "false") << '\n';
  for (std::size_t m = 0; m < result.real_counts.size(); ++m) {
    out << "client_real_samples." << m << ',' << result.real_counts[m] << '\n';
    out << "client_synthetic_samples." << m << ',' << result.synthetic_counts[m] << '\n';
    out << "client_best_accuracy." << m << ',' << cell(pers.best_accuracy[m]) << '\n';
    out << "client_global_accuracy." << m << ',' << cell(pers.initial_accuracy[m]) << '\n';
    out << "client_w2_foundation." << m << ',' << cell(result.w2_foundation[m]) << '\n';
    out << "client_w2_adapted." << m << ',' << cell(result.w2_adapted[m]) << '\n';
  }
  for (const auto &[key, value] : config_entries(cfg)) {
    // Where the files go and how many threads ran do not change any result,
    // and echoing them would break byte-identical outputs.
    if (key == "output.dir" || key == "federation.workers") continue;
    out << "config." << key << ',' << value << '\n';
  }
}

ExperimentConfig config_from_summary(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "key,value") {
    throw InvalidArgument("summary: missing header row");
  }
  ExperimentConfig cfg;
  std::vector<std::pair<std::string, std::string>> entries;
  while (std::getline(in, line)) {
    if (line.rfind("config.", 0) != 0) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("summary: malformed row");
    entries.emplace_back(line.substr(7, comma - 7), line.substr(comma + 1));
  }
  for (const auto &[k, v] : entries) {
    if (k == "world.preset") apply_config_entry(cfg, k, v);
  }
  for (const auto &[k, v] : entries) {
    if (k != "world.preset") apply_config_entry(cfg, k, v);
  }
  return cfg;
}

void write_run_outputs(const ExperimentResult &result, const std::string &dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  {
    auto out = open_output(base / "rounds.csv");
    write_rounds(out, result.generalization.rounds, result.config.world.class_count);
  }
  {
    auto out = open_output(base / "summary.csv");
    write_summary(out, result);
  }
  {
    auto out = open_output(base / "partition.csv");
    write_histogram_report(out, label_histogram_report(result.partition));
  }
  {
    auto out = open_output(base / "assignment.csv");
    write_partition_assignment(out, result.partition);
  }
  {
    auto out = open_output(base / "timing.csv");
    out << "key,value\nwall_seconds," << format_double(result.wall_seconds) << '\n';
  }
}

void write_partition_report(const ExperimentConfig &cfg, const std::string &path) {
  Setup setup = build_setup(cfg);
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  auto out = open_output(p);
  write_histogram_report(out, label_histogram_report(setup.partition));
}

void write_world(const ExperimentConfig &cfg, const std::string &dir) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  World world = make_world(cfg.world, cfg.effective_world_seed());
  fs::create_directories(dir);
  const fs::path base(dir);
  {
    auto out = open_output(base / "world_spec.csv");
    write_world_spec(out, world.spec);
  }
  save_dataset((base / "train.csv").string(), world.train_pool);
  save_dataset((base / "test.csv").string(), world.test_pool);
  save_dataset((base / "foundation.csv").string(), world.foundation_pool);
}

ExperimentConfig sweep_config(const ExperimentConfig &base, const std::string &axis_key,
                              const std::string &value, std::size_t index) {
  ExperimentConfig cfg = base;
  cfg.world_seed = base.effective_world_seed();
  cfg.seed = derive_seed(base.seed, {tag(StreamTag::kSweep), index});
  if (axis_key == "partition.beta" && value == "iid") {
    cfg.partition_mode = PartitionMode::kIid;
  } else {
    apply_config_entry(cfg, axis_key, value);
    if (axis_key == "partition.beta") cfg.partition_mode = PartitionMode::kDirichlet;
  }
  validate_config(cfg);
  return cfg;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig &base, const std::string &axis,
                                const std::vector<std::string> &values,
                                const std::string &out_dir) {
  const std::string key = sweep_axis_key(axis);
  if (values.empty()) throw ConfigError("--values", "no sweep values given");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig cfg = sweep_config(base, key, values[i], i);
    ExperimentResult result = run_experiment(cfg);
    if (!out_dir.empty()) {
      write_run_outputs(result, (std::filesystem::path(out_dir) /
                                 ("value_" + std::to_string(i))).string());
    }
    rows.push_back({values[i], cfg.seed, result.final_accuracy(),
                    result.personalization.mean_best, result.personalization.mean_initial});
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto out = open_output(std::filesystem::path(out_dir) / "sweep.csv");
    write_sweep_table(out, key, rows);
  }
  return rows;
}

void write_sweep_table(std::ostream &out, const std::string &axis_key,
                       const std::vector<SweepRow> &rows) {
  out << "axis,value,seed,final_global_accuracy,mean_personalized_accuracy,"
         "mean_global_local_accuracy\n";
  for (const auto &r : rows) {
    out << axis_key << ',' << r.value << ',' << r.seed << ',' << format_double(r.final_accuracy)
        << ',' << cell(r.mean_personalized) << ',' << cell(r.mean_global_local) << '\n';
  }
}

}  // namespace fedsynth
