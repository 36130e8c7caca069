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

#include "fedsynth/learner.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kInitStd = 0.01;

// Scratch buffers reused across samples.
struct Workspace {
  Vector hidden;
  Vector logits;
  Vector delta_out;
  Vector delta_hidden;
};

void check_shape(const ModelParams &p) {
  if (p.values.size() != param_count(p.arch, p.dim, p.classes, p.hidden)) {
    throw InvalidArgument("model params: vector length does not match shape");
  }
}

// Numerically stable in-place softmax.
void softmax_inplace(Vector &z) {
  double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double &v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double &v : z) v /= total;
}

// Fills ws.logits with class probabilities (and ws.hidden for mlp1).
void forward_into(const ModelParams &p, std::span<const double> x, Workspace &ws) {
  const auto d = static_cast<std::size_t>(p.dim);
  const auto c = static_cast<std::size_t>(p.classes);
  const double *w = p.values.data();
  ws.logits.resize(c);
  if (p.arch == Arch::kSoftmax) {
    const double *b = w + c * d;
    for (std::size_t k = 0; k < c; ++k) {
      double z = b[k];
      const double *row = w + k * d;
      for (std::size_t j = 0; j < d; ++j) z += row[j] * x[j];
      ws.logits[k] = z;
    }
  } else {
    const auto h = static_cast<std::size_t>(p.hidden);
    const double *b1 = w + h * d;
    const double *w2 = b1 + h;
    const double *b2 = w2 + c * h;
    ws.hidden.resize(h);
    for (std::size_t u = 0; u < h; ++u) {
      double z = b1[u];
      const double *row = w + u * d;
      for (std::size_t j = 0; j < d; ++j) z += row[j] * x[j];
      ws.hidden[u] = std::tanh(z);
    }
    for (std::size_t k = 0; k < c; ++k) {
      double z = b2[k];
      const double *row = w2 + k * h;
      for (std::size_t u = 0; u < h; ++u) z += row[u] * ws.hidden[u];
      ws.logits[k] = z;
    }
  }
  softmax_inplace(ws.logits);
}

// Adds d(-log p_y)/d(values) into grad; returns the sample loss.
double accumulate_sample(const ModelParams &p, std::span<const double> x, int y,
                         Workspace &ws, double *grad) {
  forward_into(p, x, ws);
  const auto d = static_cast<std::size_t>(p.dim);
  const auto c = static_cast<std::size_t>(p.classes);
  const auto label = static_cast<std::size_t>(y);
  double p_true = ws.logits[label];
  if (p_true < kProbClamp) {
    // Clamped region: the loss is flat there.
    return -std::log(kProbClamp);
  }
  ws.delta_out.assign(ws.logits.begin(), ws.logits.end());
  ws.delta_out[label] -= 1.0;

  if (p.arch == Arch::kSoftmax) {
    double *gb = grad + c * d;
    for (std::size_t k = 0; k < c; ++k) {
      double g = ws.delta_out[k];
      double *row = grad + k * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += g * x[j];
      gb[k] += g;
    }
  } else {
    const auto h = static_cast<std::size_t>(p.hidden);
    const double *w2 = p.values.data() + h * d + h;
    double *gb1 = grad + h * d;
    double *gw2 = gb1 + h;
    double *gb2 = gw2 + c * h;
    ws.delta_hidden.assign(h, 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      double g = ws.delta_out[k];
      double *grow = gw2 + k * h;
      const double *wrow = w2 + k * h;
      for (std::size_t u = 0; u < h; ++u) {
        grow[u] += g * ws.hidden[u];
        ws.delta_hidden[u] += g * wrow[u];
      }
      gb2[k] += g;
    }
    for (std::size_t u = 0; u < h; ++u) {
      double a = ws.hidden[u];
      double g = ws.delta_hidden[u] * (1.0 - a * a);
      double *row = grad + u * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += g * x[j];
      gb1[u] += g;
    }
  }
  return -std::log(p_true);
}

void check_batch(const ModelParams &p, const Dataset &data) {
  check_shape(p);
  if (data.dim() != p.dim || data.class_count() != p.classes) {
    throw InvalidArgument("dataset shape does not match model");
  }
}

}  // namespace

std::string arch_name(Arch arch) { return arch == Arch::kSoftmax ? "softmax" : "mlp1"; }

Arch parse_arch(const std::string &name) {
  if (name == "softmax") return Arch::kSoftmax;
  if (name == "mlp1") return Arch::kMlp1;
  throw InvalidArgument("unknown architecture '" + name + "'");
}

std::size_t param_count(Arch arch, int dim, int classes, int hidden) {
  const auto d = static_cast<std::size_t>(dim);
  const auto c = static_cast<std::size_t>(classes);
  if (arch == Arch::kSoftmax) return d * c + c;
  const auto h = static_cast<std::size_t>(hidden);
  return d * h + h + h * c + c;
}

void validate_train_config(const TrainConfig &cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InvalidArgument("train config: learning rate must be finite and >= 0");
  }
  if (cfg.batch_size < 1) throw InvalidArgument("train config: batch size must be >= 1");
  if (cfg.local_epochs < 0) throw InvalidArgument("train config: epochs must be >= 0");
}

ModelParams init_params(Arch arch, int dim, int classes, int hidden, RngStream stream) {
  if (dim < 1 || classes < 1) throw InvalidArgument("init_params: d and C must be >= 1");
  if (arch == Arch::kMlp1 && hidden < 1) {
    throw InvalidArgument("init_params: mlp1 needs hidden width >= 1");
  }
  ModelParams p{arch, dim, classes, arch == Arch::kSoftmax ? 0 : hidden, {}};
  p.values.assign(param_count(arch, dim, classes, p.hidden), 0.0);
  const auto d = static_cast<std::size_t>(dim);
  const auto c = static_cast<std::size_t>(classes);
  auto fill = [&](std::size_t offset, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) p.values[offset + i] = kInitStd * stream.normal();
  };
  if (arch == Arch::kSoftmax) {
    fill(0, c * d);
  } else {
    const auto h = static_cast<std::size_t>(hidden);
    fill(0, h * d);
    fill(h * d + h, c * h);
  }
  return p;
}

Vector forward(const ModelParams &params, std::span<const double> x) {
  check_shape(params);
  if (x.size() != static_cast<std::size_t>(params.dim)) {
    throw InvalidArgument("forward: input dimension mismatch");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("forward: non-finite input");
  }
  Workspace ws;
  forward_into(params, x, ws);
  return ws.logits;
}

int predict(const ModelParams &params, std::span<const double> x) {
  Vector probs = forward(params, x);
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double ce_loss(const ModelParams &params, const Dataset &batch) {
  check_batch(params, batch);
  if (batch.empty()) throw InvalidArgument("ce_loss: empty batch");
  Workspace ws;
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    forward_into(params, batch.features(i), ws);
    double p_true = std::clamp(ws.logits[static_cast<std::size_t>(batch.label(i))],
                               kProbClamp, 1.0);
    total += -std::log(p_true);
  }
  return total / static_cast<double>(batch.size());
}

Vector gradient(const ModelParams &params, const Dataset &data,
                std::span<const std::size_t> rows) {
  check_batch(params, data);
  if (rows.empty()) throw InvalidArgument("gradient: empty batch");
  Vector grad(params.values.size(), 0.0);
  Workspace ws;
  for (std::size_t i : rows) {
    accumulate_sample(params, data.features(i), data.label(i), ws, grad.data());
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double &g : grad) g *= inv;
  return grad;
}

Vector gradient(const ModelParams &params, const Dataset &batch) {
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), 0);
  return gradient(params, batch, rows);
}

ModelParams local_update(const ModelParams &params, const Dataset &data,
                         const TrainConfig &cfg, RngStream stream) {
  check_batch(params, data);
  validate_train_config(cfg);
  if (data.empty()) throw InvalidArgument("local_update: empty dataset");
  ModelParams out = params;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Vector grad(out.values.size());
  Workspace ws;
  for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    if (cfg.shuffle) stream.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t r = start; r < stop; ++r) {
        std::size_t i = order[r];
        accumulate_sample(out, data.features(i), data.label(i), ws, grad.data());
      }
      // Same arithmetic as gradient(): mean first, then the step.
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t k = 0; k < grad.size(); ++k) {
        out.values[k] -= cfg.learning_rate * (grad[k] * inv);
      }
    }
  }
  for (double v : out.values) {
    if (!std::isfinite(v)) throw NumericalError("local_update produced non-finite weights");
  }
  return out;
}

void write_params(std::ostream &out, const ModelParams &params) {
  check_shape(params);
  out << "arch,dim,classes,hidden,count\n"
      << arch_name(params.arch) << ',' << params.dim << ',' << params.classes << ','
      << params.hidden << ',' << params.values.size() << '\n';
  for (double v : params.values) out << format_double(v) << '\n';
}

ModelParams read_params(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "arch,dim,classes,hidden,count") {
    throw InvalidArgument("params: missing header row");
  }
  if (!std::getline(in, line)) throw InvalidArgument("params: missing shape row");
  auto f = split_fields(line);
  if (f.size() != 5) throw InvalidArgument("params: bad shape row");
  ModelParams p;
  p.arch = parse_arch(std::string(f[0]));
  p.dim = static_cast<int>(parse_integer(f[1]));
  p.classes = static_cast<int>(parse_integer(f[2]));
  p.hidden = static_cast<int>(parse_integer(f[3]));
  auto count = static_cast<std::size_t>(parse_integer(f[4]));
  p.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw InvalidArgument("params: truncated values");
    p.values.push_back(parse_double(line));
  }
  check_shape(p);
  return p;
}

}  // namespace fedsynth
