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

#ifndef FEDSYNTH_WORLDGEN_H_
#define FEDSYNTH_WORLDGEN_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fedsynth/dataset.h"
#include "fedsynth/rng.h"

namespace fedsynth {

// Ground-truth class-conditional diagonal Gaussians plus the affine gap
// x -> gap_scale * x + gap_shift that separates the foundation corpus from
// the true domain.
struct WorldSpec {
  int class_count = 0;
  int dim = 0;
  std::vector<Vector> class_means;  // [C][d]
  std::vector<Vector> class_stds;   // [C][d], all > 0
  double separation = 0.0;
  Vector gap_scale;  // [d], all > 0
  Vector gap_shift;  // [d]
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_foundation = 0;

  bool operator==(const WorldSpec &) const = default;
};

// Knobs for drawing a WorldSpec. Class means lie on a sphere of radius
// `separation` around center * 1; per-dimension stds are uniform in
// [std_min, std_max].
struct WorldParams {
  int class_count = 10;
  int dim = 16;
  double separation = 3.0;
  double center = 2.0;
  double std_min = 0.1;
  double std_max = 2.0;
  double gap_scale = 1.5;
  double gap_shift = 0.5;
  std::size_t n_train = 2000;
  std::size_t n_test = 1000;
  std::size_t n_foundation = 20000;

  bool operator==(const WorldParams &) const = default;
};

struct World {
  WorldSpec spec;
  Dataset train_pool;
  Dataset test_pool;
  Dataset foundation_pool;
};

// Throws InvalidArgument when a WorldSpec invariant does not hold.
void validate_world_spec(const WorldSpec &spec);

WorldSpec draw_world_spec(const WorldParams &params, RngStream stream);

World build_world(const WorldSpec &spec, RngStream stream);

// Presets: "small10", "wide100", "single-label-demo".
WorldParams preset_params(const std::string &preset);
World default_world(const std::string &preset, std::uint64_t seed);
World make_world(const WorldParams &params, std::uint64_t seed);

// Elementwise gap and its inverse.
Vector apply_gap(const WorldSpec &spec, std::span<const double> x);
Vector invert_gap(const WorldSpec &spec, std::span<const double> x);

// Rows: "kind,class,v1,...,vd" with kind in {mean,std,gap_scale,gap_shift}
// preceded by a "C,d,separation,n_train,n_test,n_foundation" header row.
void write_world_spec(std::ostream &out, const WorldSpec &spec);
WorldSpec read_world_spec(std::istream &in);

}  // namespace fedsynth

#endif  // FEDSYNTH_WORLDGEN_H_
