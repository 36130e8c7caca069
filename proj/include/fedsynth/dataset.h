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

#ifndef FEDSYNTH_DATASET_H_
#define FEDSYNTH_DATASET_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedsynth {

using Vector = std::vector<double>;
using LabelHistogram = std::vector<std::size_t>;

struct Sample {
  Vector features;
  int label = 0;
};

// Labeled feature vectors of a fixed dimension, stored row-major. Order is
// insertion order and is part of the dataset's identity.
class Dataset {
 public:
  Dataset(int class_count, int dim);

  int class_count() const { return class_count_; }
  int dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  int label(std::size_t i) const { return labels_[i]; }
  Sample sample(std::size_t i) const;

  void add(std::span<const double> x, int label);
  void add(const Sample &s) { add(s.features, s.label); }
  void append(const Dataset &other);
  void reserve(std::size_t n);

  LabelHistogram label_histogram() const;
  Dataset subset(std::span<const std::size_t> indices) const;
  // Indices of all samples with the given label, in dataset order.
  std::vector<std::size_t> indices_of_class(int label) const;

  bool operator==(const Dataset &other) const = default;

 private:
  int class_count_;
  int dim_;
  std::vector<double> features_;
  std::vector<int> labels_;
};

// Shortest decimal rendering that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

// Split one delimited line; no quoting.
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

// Text format: header "C,d,n" then n rows "label,f1,...,fd".
void write_dataset(std::ostream &out, const Dataset &data);
Dataset read_dataset(std::istream &in);
void save_dataset(const std::string &path, const Dataset &data);
Dataset load_dataset(const std::string &path);

}  // namespace fedsynth

#endif  // FEDSYNTH_DATASET_H_
