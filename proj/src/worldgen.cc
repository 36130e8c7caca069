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

#include "fedsynth/worldgen.h"

#include <cmath>
#include <istream>
#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

namespace {

void check_vector(const Vector &v, int dim, const char *what) {
  if (v.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument(std::string("world spec: ") + what + " has wrong dimension");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidArgument(std::string("world spec: ") + what + " is not finite");
    }
  }
}

// Balanced pool: sample i has label i mod C, so every class gets n / C
// samples and the first n mod C classes get one more.
Dataset draw_pool(const WorldSpec &spec, std::size_t n, RngStream stream,
                  bool through_gap) {
  Dataset pool(spec.class_count, spec.dim);
  pool.reserve(n);
  Vector x(static_cast<std::size_t>(spec.dim));
  for (std::size_t i = 0; i < n; ++i) {
    int c = static_cast<int>(i % static_cast<std::size_t>(spec.class_count));
    const Vector &mu = spec.class_means[static_cast<std::size_t>(c)];
    const Vector &sd = spec.class_stds[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < x.size(); ++j) {
      double v = mu[j] + sd[j] * stream.normal();
      x[j] = through_gap ? spec.gap_scale[j] * v + spec.gap_shift[j] : v;
    }
    pool.add(x, c);
  }
  return pool;
}

void write_row(std::ostream &out, const char *kind, std::size_t index,
               const Vector &values) {
  out << kind << ',' << index;
  for (double v : values) out << ',' << format_double(v);
  out << '\n';
}

}  // namespace

void validate_world_spec(const WorldSpec &spec) {
  if (spec.class_count < 1 || spec.dim < 1) {
    throw InvalidArgument("world spec: class_count and dim must be >= 1");
  }
  const auto classes = static_cast<std::size_t>(spec.class_count);
  if (spec.class_means.size() != classes || spec.class_stds.size() != classes) {
    throw InvalidArgument("world spec: need one mean and std vector per class");
  }
  for (std::size_t c = 0; c < classes; ++c) {
    check_vector(spec.class_means[c], spec.dim, "class mean");
    check_vector(spec.class_stds[c], spec.dim, "class std");
    for (double s : spec.class_stds[c]) {
      if (!(s > 0.0)) throw InvalidArgument("world spec: class std entries must be > 0");
    }
    for (std::size_t other = 0; other < c; ++other) {
      if (spec.class_means[c] == spec.class_means[other]) {
        throw InvalidArgument("world spec: class means must be pairwise distinct");
      }
    }
  }
  check_vector(spec.gap_scale, spec.dim, "gap scale");
  check_vector(spec.gap_shift, spec.dim, "gap shift");
  for (double a : spec.gap_scale) {
    if (!(a > 0.0)) throw InvalidArgument("world spec: gap scale entries must be > 0");
  }
  if (spec.n_train < classes || spec.n_test < classes || spec.n_foundation < classes) {
    throw InvalidArgument("world spec: every pool size must be >= class_count");
  }
}

WorldSpec draw_world_spec(const WorldParams &params, RngStream stream) {
  if (params.class_count < 1 || params.dim < 1) {
    throw InvalidArgument("world params: class_count and dim must be >= 1");
  }
  if (!(params.std_min > 0.0) || params.std_max < params.std_min) {
    throw InvalidArgument("world params: need 0 < std_min <= std_max");
  }
  if (!(params.separation > 0.0)) {
    throw InvalidArgument("world params: separation must be > 0");
  }
  WorldSpec spec;
  spec.class_count = params.class_count;
  spec.dim = params.dim;
  spec.separation = params.separation;
  spec.n_train = params.n_train;
  spec.n_test = params.n_test;
  spec.n_foundation = params.n_foundation;
  spec.gap_scale.assign(static_cast<std::size_t>(params.dim), params.gap_scale);
  spec.gap_shift.assign(static_cast<std::size_t>(params.dim), params.gap_shift);

  RngStream mean_stream = stream.derive({tag(StreamTag::kClassMeans)});
  RngStream std_stream = stream.derive({tag(StreamTag::kClassStd)});
  for (int c = 0; c < params.class_count; ++c) {
    // Uniform direction on the sphere: normalized Gaussian vector.
    Vector u = standard_normal_vector(mean_stream, static_cast<std::size_t>(params.dim));
    double norm = 0.0;
    for (double v : u) norm += v * v;
    norm = std::sqrt(norm);
    Vector mu(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      mu[j] = params.center + params.separation * u[j] / norm;
    }
    Vector sd(u.size());
    for (double &s : sd) {
      s = params.std_min + (params.std_max - params.std_min) * std_stream.uniform();
    }
    spec.class_means.push_back(std::move(mu));
    spec.class_stds.push_back(std::move(sd));
  }
  validate_world_spec(spec);
  return spec;
}

World build_world(const WorldSpec &spec, RngStream stream) {
  validate_world_spec(spec);
  return World{
      spec,
      draw_pool(spec, spec.n_train, stream.derive({tag(StreamTag::kTrainPool)}), false),
      draw_pool(spec, spec.n_test, stream.derive({tag(StreamTag::kTestPool)}), false),
      draw_pool(spec, spec.n_foundation,
                stream.derive({tag(StreamTag::kFoundationPool)}), true),
  };
}

WorldParams preset_params(const std::string &preset) {
  WorldParams p;
  if (preset == "small10") {
    return p;
  }
  if (preset == "wide100") {
    p.class_count = 100;
    p.dim = 32;
    p.n_train = 20000;
    p.n_test = 10000;
    p.n_foundation = 50000;
    return p;
  }
  if (preset == "single-label-demo") {
    p.dim = 8;
    p.n_foundation = 10000;
    return p;
  }
  throw InvalidArgument("unknown world preset '" + preset + "'");
}

World make_world(const WorldParams &params, std::uint64_t seed) {
  RngStream root(seed, {tag(StreamTag::kWorld)});
  WorldSpec spec = draw_world_spec(params, root);
  return build_world(spec, root);
}

World default_world(const std::string &preset, std::uint64_t seed) {
  return make_world(preset_params(preset), seed);
}

Vector apply_gap(const WorldSpec &spec, std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = spec.gap_scale[j] * x[j] + spec.gap_shift[j];
  }
  return out;
}

Vector invert_gap(const WorldSpec &spec, std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = (x[j] - spec.gap_shift[j]) / spec.gap_scale[j];
  }
  return out;
}

void write_world_spec(std::ostream &out, const WorldSpec &spec) {
  out << "kind,index,values\n";
  out << "shape,0," << spec.class_count << ',' << spec.dim << ',' << spec.n_train << ','
      << spec.n_test << ',' << spec.n_foundation << ',' << format_double(spec.separation)
      << '\n';
  for (std::size_t c = 0; c < spec.class_means.size(); ++c) {
    write_row(out, "mean", c, spec.class_means[c]);
  }
  for (std::size_t c = 0; c < spec.class_stds.size(); ++c) {
    write_row(out, "std", c, spec.class_stds[c]);
  }
  write_row(out, "gap_scale", 0, spec.gap_scale);
  write_row(out, "gap_shift", 0, spec.gap_shift);
}

WorldSpec read_world_spec(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "kind,index,values") {
    throw InvalidArgument("world spec: missing header row");
  }
  WorldSpec spec;
  bool have_shape = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() < 3) throw InvalidArgument("world spec: short row");
    std::string_view kind = fields[0];
    if (kind == "shape") {
      if (fields.size() != 8) throw InvalidArgument("world spec: bad shape row");
      spec.class_count = static_cast<int>(parse_integer(fields[2]));
      spec.dim = static_cast<int>(parse_integer(fields[3]));
      spec.n_train = static_cast<std::size_t>(parse_integer(fields[4]));
      spec.n_test = static_cast<std::size_t>(parse_integer(fields[5]));
      spec.n_foundation = static_cast<std::size_t>(parse_integer(fields[6]));
      spec.separation = parse_double(fields[7]);
      have_shape = true;
      continue;
    }
    if (!have_shape) throw InvalidArgument("world spec: shape row must come first");
    Vector values;
    for (std::size_t i = 2; i < fields.size(); ++i) values.push_back(parse_double(fields[i]));
    if (kind == "mean") {
      spec.class_means.push_back(std::move(values));
    } else if (kind == "std") {
      spec.class_stds.push_back(std::move(values));
    } else if (kind == "gap_scale") {
      spec.gap_scale = std::move(values);
    } else if (kind == "gap_shift") {
      spec.gap_shift = std::move(values);
    } else {
      throw InvalidArgument("world spec: unknown row kind '" + std::string(kind) + "'");
    }
  }
  validate_world_spec(spec);
  return spec;
}

}  // namespace fedsynth
