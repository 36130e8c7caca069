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

#include "fedsynth/genmodel.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

namespace {

// Per-class sample mean and sum of squared deviations, two-pass.
struct ClassMoments {
  std::vector<std::size_t> count;
  std::vector<Vector> mean;
  std::vector<Vector> sum_sq;
};

ClassMoments class_moments(const Dataset &data) {
  const auto classes = static_cast<std::size_t>(data.class_count());
  const auto d = static_cast<std::size_t>(data.dim());
  ClassMoments m{std::vector<std::size_t>(classes, 0),
                 std::vector<Vector>(classes, Vector(d, 0.0)),
                 std::vector<Vector>(classes, Vector(d, 0.0))};
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto c = static_cast<std::size_t>(data.label(i));
    ++m.count[c];
    auto x = data.features(i);
    for (std::size_t j = 0; j < d; ++j) m.mean[c][j] += x[j];
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (m.count[c] == 0) continue;
    for (double &v : m.mean[c]) v /= static_cast<double>(m.count[c]);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto c = static_cast<std::size_t>(data.label(i));
    auto x = data.features(i);
    for (std::size_t j = 0; j < d; ++j) {
      double dev = x[j] - m.mean[c][j];
      m.sum_sq[c][j] += dev * dev;
    }
  }
  return m;
}

void check_generator(const Generator &gen) {
  if (gen.means.size() != static_cast<std::size_t>(gen.class_count) ||
      gen.stds.size() != static_cast<std::size_t>(gen.class_count)) {
    throw InvalidArgument("generator: need one mean and std vector per class");
  }
}

}  // namespace

Generator fit_foundation(const Dataset &foundation_pool) {
  ClassMoments m = class_moments(foundation_pool);
  Generator gen{foundation_pool.class_count(), foundation_pool.dim(), {}, {}};
  for (std::size_t c = 0; c < m.count.size(); ++c) {
    if (m.count[c] < 2) {
      throw InvalidArgument("fit_foundation: class " + std::to_string(c) +
                            " has fewer than 2 samples");
    }
    Vector sd(m.sum_sq[c].size());
    for (std::size_t j = 0; j < sd.size(); ++j) {
      sd[j] = std::max(kStdFloor,
                       std::sqrt(m.sum_sq[c][j] / static_cast<double>(m.count[c] - 1)));
    }
    gen.means.push_back(m.mean[c]);
    gen.stds.push_back(std::move(sd));
  }
  return gen;
}

Dataset synthesize(const Generator &gen, int label, std::size_t n, RngStream &stream) {
  check_generator(gen);
  if (label < 0 || label >= gen.class_count) {
    throw InvalidArgument("synthesize: class index out of range");
  }
  Dataset out(gen.class_count, gen.dim);
  out.reserve(n);
  const Vector &mu = gen.means[static_cast<std::size_t>(label)];
  const Vector &sd = gen.stds[static_cast<std::size_t>(label)];
  Vector x(mu.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = mu[j] + sd[j] * stream.normal();
    out.add(x, label);
  }
  return out;
}

std::vector<std::size_t> plan_synthesis(const LabelHistogram &local_hist,
                                        std::size_t target_per_class) {
  std::vector<std::size_t> plan(local_hist.size(), 0);
  for (std::size_t c = 0; c < local_hist.size(); ++c) {
    plan[c] = local_hist[c] >= target_per_class ? 0 : target_per_class - local_hist[c];
  }
  return plan;
}

GapEstimate estimate_gap(const Generator &gen, const Dataset &local_real) {
  check_generator(gen);
  if (local_real.empty()) throw InvalidArgument("estimate_gap: local data is empty");
  if (local_real.dim() != gen.dim || local_real.class_count() != gen.class_count) {
    throw InvalidArgument("estimate_gap: shape mismatch between generator and data");
  }
  ClassMoments m = class_moments(local_real);
  const auto d = static_cast<std::size_t>(gen.dim);

  // Pooled within-class variances over owned classes (>= 2 samples), both
  // weighted by the local degrees of freedom.
  Vector local_ss(d, 0.0), gen_ss(d, 0.0);
  double dof = 0.0;
  std::size_t owned_samples = 0;
  int owned = 0;
  for (std::size_t c = 0; c < m.count.size(); ++c) {
    if (m.count[c] < 2) continue;
    ++owned;
    owned_samples += m.count[c];
    double w = static_cast<double>(m.count[c] - 1);
    dof += w;
    for (std::size_t j = 0; j < d; ++j) {
      local_ss[j] += m.sum_sq[c][j];
      gen_ss[j] += w * gen.stds[c][j] * gen.stds[c][j];
    }
  }
  if (owned == 0) {
    throw InvalidArgument("estimate_gap: no class has at least 2 local samples");
  }

  GapEstimate gap{Vector(d), Vector(d, 0.0), owned};
  for (std::size_t j = 0; j < d; ++j) {
    double local_std = std::max(kStdFloor, std::sqrt(local_ss[j] / dof));
    double gen_std = std::sqrt(gen_ss[j] / dof);
    gap.scale[j] = std::max(kStdFloor, gen_std / local_std);
  }
  for (std::size_t c = 0; c < m.count.size(); ++c) {
    if (m.count[c] < 2) continue;
    double w = static_cast<double>(m.count[c]) / static_cast<double>(owned_samples);
    for (std::size_t j = 0; j < d; ++j) {
      gap.shift[j] += w * (gen.means[c][j] - gap.scale[j] * m.mean[c][j]);
    }
  }
  return gap;
}

Generator adapt(const Generator &gen, const GapEstimate &gap, double alpha) {
  check_generator(gen);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("adapt: alpha must lie in [0, 1]");
  }
  if (gap.scale.size() != static_cast<std::size_t>(gen.dim) ||
      gap.shift.size() != static_cast<std::size_t>(gen.dim)) {
    throw InvalidArgument("adapt: gap estimate dimension mismatch");
  }
  Generator out = gen;
  for (std::size_t c = 0; c < out.means.size(); ++c) {
    for (std::size_t j = 0; j < gap.scale.size(); ++j) {
      double m = gen.means[c][j];
      double s = gen.stds[c][j];
      double corrected_mean = (m - gap.shift[j]) / gap.scale[j];
      double corrected_std = s / gap.scale[j];
      out.means[c][j] = m + alpha * (corrected_mean - m);
      out.stds[c][j] = std::max(kStdFloor, s + alpha * (corrected_std - s));
    }
  }
  return out;
}

RecoveryDistance w2_to_global(const Generator &gen, const WorldSpec &spec) {
  check_generator(gen);
  if (gen.class_count != spec.class_count || gen.dim != spec.dim) {
    throw InvalidArgument("w2_to_global: generator does not match world shape");
  }
  RecoveryDistance out;
  out.per_class.reserve(static_cast<std::size_t>(gen.class_count));
  for (std::size_t c = 0; c < gen.means.size(); ++c) {
    double w2 = 0.0;
    for (std::size_t j = 0; j < gen.means[c].size(); ++j) {
      double dm = gen.means[c][j] - spec.class_means[c][j];
      double ds = gen.stds[c][j] - spec.class_stds[c][j];
      w2 += dm * dm + ds * ds;
    }
    out.per_class.push_back(w2);
    out.mean += w2;
  }
  out.mean /= static_cast<double>(out.per_class.size());
  return out;
}

void write_generator(std::ostream &out, const Generator &gen) {
  check_generator(gen);
  out << "class,kind,values\n";
  for (std::size_t c = 0; c < gen.means.size(); ++c) {
    out << c << ",mean";
    for (double v : gen.means[c]) out << ',' << format_double(v);
    out << '\n' << c << ",std";
    for (double v : gen.stds[c]) out << ',' << format_double(v);
    out << '\n';
  }
}

Generator read_generator(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "class,kind,values") {
    throw InvalidArgument("generator: missing header row");
  }
  Generator gen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() < 3) throw InvalidArgument("generator: short row");
    auto c = static_cast<std::size_t>(parse_integer(fields[0]));
    Vector values;
    for (std::size_t i = 2; i < fields.size(); ++i) values.push_back(parse_double(fields[i]));
    if (gen.dim == 0) gen.dim = static_cast<int>(values.size());
    if (values.size() != static_cast<std::size_t>(gen.dim)) {
      throw InvalidArgument("generator: inconsistent dimension");
    }
    auto &target = fields[1] == "mean" ? gen.means : gen.stds;
    if (fields[1] != "mean" && fields[1] != "std") {
      throw InvalidArgument("generator: unknown row kind");
    }
    if (c != target.size()) throw InvalidArgument("generator: classes out of order");
    target.push_back(std::move(values));
  }
  gen.class_count = static_cast<int>(gen.means.size());
  if (gen.class_count == 0 || gen.stds.size() != gen.means.size()) {
    throw InvalidArgument("generator: incomplete moment table");
  }
  return gen;
}

}  // namespace fedsynth
