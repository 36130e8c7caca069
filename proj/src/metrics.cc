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

#include "fedsynth/metrics.h"

#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

double accuracy(const ModelParams &params, const Dataset &data) {
  if (data.empty()) throw InvalidArgument("accuracy: empty dataset");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(params, data.features(i)) == data.label(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

ClassAccuracy class_accuracy(const ModelParams &params, const Dataset &data) {
  const auto classes = static_cast<std::size_t>(data.class_count());
  std::vector<std::size_t> hits(classes, 0), totals(classes, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto y = static_cast<std::size_t>(data.label(i));
    ++totals[y];
    if (predict(params, data.features(i)) == data.label(i)) ++hits[y];
  }
  ClassAccuracy out(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (totals[c] > 0) {
      out[c] = static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
    }
  }
  return out;
}

std::optional<double> mean_defined(const ClassAccuracy &values) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto &v : values) {
    if (v) {
      total += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

std::vector<HistogramRow> label_histogram_report(const Partition &part) {
  std::vector<HistogramRow> rows;
  for (int m = 0; m < part.client_count; ++m) {
    const auto &hist = part.histograms[static_cast<std::size_t>(m)];
    for (int k = 0; k < part.class_count; ++k) {
      rows.push_back({m, k, hist[static_cast<std::size_t>(k)]});
    }
  }
  return rows;
}

void write_histogram_report(std::ostream &out, const std::vector<HistogramRow> &rows) {
  out << "client,class,count\n";
  for (const auto &r : rows) out << r.client << ',' << r.label << ',' << r.count << '\n';
}

}  // namespace fedsynth
