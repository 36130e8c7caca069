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

#ifndef FEDSYNTH_METRICS_H_
#define FEDSYNTH_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fedsynth/dataset.h"
#include "fedsynth/learner.h"
#include "fedsynth/partition.h"

namespace fedsynth {

// Per-class accuracy; nullopt marks a class with no samples.
using ClassAccuracy = std::vector<std::optional<double>>;

struct RoundRecord {
  int round = 0;
  double global_accuracy = 0.0;
  ClassAccuracy class_accuracy;
  std::vector<std::optional<double>> client_accuracy;  // optional, may be empty
};

double accuracy(const ModelParams &params, const Dataset &data);
ClassAccuracy class_accuracy(const ModelParams &params, const Dataset &data);

// Mean over the defined entries only; nullopt if none are defined.
std::optional<double> mean_defined(const ClassAccuracy &values);

struct HistogramRow {
  int client = 0;
  int label = 0;
  std::size_t count = 0;
};

// Every (client, class) cell of the partition, client-major.
std::vector<HistogramRow> label_histogram_report(const Partition &part);
void write_histogram_report(std::ostream &out, const std::vector<HistogramRow> &rows);

// Sentinel used for undefined accuracies in CSV output.
inline constexpr const char *kUndefinedCell = "NA";

}  // namespace fedsynth

#endif  // FEDSYNTH_METRICS_H_
