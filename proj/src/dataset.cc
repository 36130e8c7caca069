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

#include "fedsynth/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

Dataset::Dataset(int class_count, int dim) : class_count_(class_count), dim_(dim) {
  if (class_count < 1) throw InvalidArgument("dataset: class_count must be >= 1");
  if (dim < 1) throw InvalidArgument("dataset: dim must be >= 1");
}

Sample Dataset::sample(std::size_t i) const {
  auto x = features(i);
  return Sample{Vector(x.begin(), x.end()), labels_[i]};
}

void Dataset::add(std::span<const double> x, int label) {
  if (x.size() != static_cast<std::size_t>(dim_)) {
    throw InvalidArgument("dataset: feature dimension mismatch");
  }
  if (label < 0 || label >= class_count_) {
    throw InvalidArgument("dataset: label out of range");
  }
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(label);
}

void Dataset::append(const Dataset &other) {
  if (other.dim_ != dim_ || other.class_count_ != class_count_) {
    throw InvalidArgument("dataset: append shape mismatch");
  }
  features_.insert(features_.end(), other.features_.begin(), other.features_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

void Dataset::reserve(std::size_t n) {
  features_.reserve(n * static_cast<std::size_t>(dim_));
  labels_.reserve(n);
}

LabelHistogram Dataset::label_histogram() const {
  LabelHistogram hist(static_cast<std::size_t>(class_count_), 0);
  for (int y : labels_) ++hist[static_cast<std::size_t>(y)];
  return hist;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(class_count_, dim_);
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw InvalidArgument("dataset: subset index out of range");
    out.add(features(i), labels_[i]);
  }
  return out;
}

std::vector<std::size_t> Dataset::indices_of_class(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  // from_chars rejects a leading '+', accept it for hand-written files.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void write_dataset(std::ostream &out, const Dataset &data) {
  out << data.class_count() << ',' << data.dim() << ',' << data.size() << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.label(i);
    for (double v : data.features(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

Dataset read_dataset(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("dataset: missing header");
  auto head = split_fields(line);
  if (head.size() != 3) throw InvalidArgument("dataset: header must be C,d,n");
  long long classes = parse_integer(head[0]);
  long long dim = parse_integer(head[1]);
  long long n = parse_integer(head[2]);
  if (classes < 1 || dim < 1 || n < 0) {
    throw InvalidArgument("dataset: invalid header values");
  }
  Dataset data(static_cast<int>(classes), static_cast<int>(dim));
  data.reserve(static_cast<std::size_t>(n));
  Vector x(static_cast<std::size_t>(dim));
  for (long long row = 0; row < n; ++row) {
    if (!std::getline(in, line)) throw InvalidArgument("dataset: truncated file");
    auto fields = split_fields(line);
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw InvalidArgument("dataset: row " + std::to_string(row) +
                            " has wrong field count");
    }
    long long label = parse_integer(fields[0]);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = parse_double(fields[j + 1]);
    if (label < 0 || label >= classes) {
      throw InvalidArgument("dataset: row " + std::to_string(row) + " label out of range");
    }
    data.add(x, static_cast<int>(label));
  }
  return data;
}

void save_dataset(const std::string &path, const Dataset &data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  write_dataset(out, data);
}

Dataset load_dataset(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open for reading: " + path);
  return read_dataset(in);
}

}  // namespace fedsynth
