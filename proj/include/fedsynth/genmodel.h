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

#ifndef FEDSYNTH_GENMODEL_H_
#define FEDSYNTH_GENMODEL_H_

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fedsynth/dataset.h"
#include "fedsynth/rng.h"
#include "fedsynth/worldgen.h"

namespace fedsynth {

inline constexpr double kStdFloor = 1e-6;

// Class-conditional diagonal Gaussian generator.
struct Generator {
  int class_count = 0;
  int dim = 0;
  std::vector<Vector> means;  // [C][d]
  std::vector<Vector> stds;   // [C][d], floored at kStdFloor

  bool operator==(const Generator &) const = default;
};

// Per-dimension affine map from the true domain into the generator's domain,
// as estimated from a client's own data.
struct GapEstimate {
  Vector scale;  // > 0
  Vector shift;
  int source_class_count = 0;
};

struct RecoveryDistance {
  std::vector<double> per_class;  // squared 2-Wasserstein per class
  double mean = 0.0;
};

// Per-class mean and unbiased per-dimension std of a pool.
Generator fit_foundation(const Dataset &foundation_pool);

// n samples of class `label`: mean + std * z with z ~ N(0, I).
Dataset synthesize(const Generator &gen, int label, std::size_t n, RngStream &stream);

// max(0, target - local count) for each class.
std::vector<std::size_t> plan_synthesis(const LabelHistogram &local_hist,
                                        std::size_t target_per_class);

GapEstimate estimate_gap(const Generator &gen, const Dataset &local_real);

// Blend every class channel toward the gap-corrected moments with strength
// alpha in [0, 1].
Generator adapt(const Generator &gen, const GapEstimate &gap, double alpha);

// Closed-form squared 2-Wasserstein between each generator class and the
// matching true class of the world.
RecoveryDistance w2_to_global(const Generator &gen, const WorldSpec &spec);

// Moment table: header "class,kind,v1,...,vd", rows kind in {mean,std}.
void write_generator(std::ostream &out, const Generator &gen);
Generator read_generator(std::istream &in);

}  // namespace fedsynth

#endif  // FEDSYNTH_GENMODEL_H_
