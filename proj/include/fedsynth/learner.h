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

#ifndef FEDSYNTH_LEARNER_H_
#define FEDSYNTH_LEARNER_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include "fedsynth/dataset.h"
#include "fedsynth/rng.h"

namespace fedsynth {

enum class Arch { kSoftmax, kMlp1 };

std::string arch_name(Arch arch);
Arch parse_arch(const std::string &name);

// Flat classifier parameters.
//
//   softmax: W[C][d], b[C]
//   mlp1:    W1[h][d], b1[h], W2[C][h], b2[C]   (tanh hidden layer)
struct ModelParams {
  Arch arch = Arch::kSoftmax;
  int dim = 0;
  int classes = 0;
  int hidden = 0;  // 0 for softmax
  Vector values;

  bool operator==(const ModelParams &) const = default;
};

std::size_t param_count(Arch arch, int dim, int classes, int hidden);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t batch_size = 128;
  int local_epochs = 5;
  bool shuffle = true;

  bool operator==(const TrainConfig &) const = default;
};

void validate_train_config(const TrainConfig &cfg);

// Weights ~ N(0, 0.01^2), biases 0. `hidden` is ignored for softmax.
ModelParams init_params(Arch arch, int dim, int classes, int hidden, RngStream stream);

Vector forward(const ModelParams &params, std::span<const double> x);

// Index of the largest class probability, lowest index on ties.
int predict(const ModelParams &params, std::span<const double> x);

// Mean of -log(clamp(p_true, 1e-12, 1)).
double ce_loss(const ModelParams &params, const Dataset &batch);

// Exact gradient of ce_loss with respect to params.values.
Vector gradient(const ModelParams &params, const Dataset &batch);
Vector gradient(const ModelParams &params, const Dataset &data,
                std::span<const std::size_t> rows);

// E_local epochs of plain mini-batch SGD; returns the updated copy.
ModelParams local_update(const ModelParams &params, const Dataset &data,
                         const TrainConfig &cfg, RngStream stream);

// Header "arch,dim,classes,hidden,count" then one value per line.
void write_params(std::ostream &out, const ModelParams &params);
ModelParams read_params(std::istream &in);

}  // namespace fedsynth

#endif  // FEDSYNTH_LEARNER_H_
