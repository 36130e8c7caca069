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

#ifndef FEDSYNTH_PARTITION_H_
#define FEDSYNTH_PARTITION_H_

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fedsynth/dataset.h"
#include "fedsynth/rng.h"

namespace fedsynth {

using IndexList = std::vector<std::size_t>;

// Assignment of train-pool (and mirrored test-pool) indices to clients.
//
// train_indices are pairwise disjoint. injected_indices hold samples added
// by inject_global_fraction; they may repeat across clients and may also
// repeat a client's own train indices. histograms count both.
struct Partition {
  int client_count = 0;
  int class_count = 0;
  LabelHistogram pool_class_counts;
  std::vector<IndexList> train_indices;
  std::vector<IndexList> injected_indices;
  std::vector<LabelHistogram> histograms;
  std::vector<IndexList> test_indices;
  // Per-class factor applied to test demands when they exceeded the test
  // pool; 1 when no scaling was needed. Empty until mirror_test_split.
  std::vector<double> test_scale;

  // train + injected indices for one client, in that order.
  IndexList client_train_indices(int client) const;
  bool operator==(const Partition &) const = default;
};

struct DirichletOptions {
  // Redraw a class's proportions (up to 100 times) whenever some client
  // would end up with no samples at all.
  bool strict_nonempty = false;
};

Partition dirichlet_partition(const Dataset &pool, int client_count, double beta,
                              RngStream stream, DirichletOptions options = {});
// One client per class; client m receives exactly the samples of class m.
Partition single_label_partition(const Dataset &pool, RngStream stream);
Partition iid_partition(const Dataset &pool, int client_count, RngStream stream);
Partition inject_global_fraction(const Partition &part, const Dataset &pool,
                                 double rho, RngStream stream);
// Gives each client test samples of class k in proportion to its train
// histogram, split by round_allocation so no sample is used twice.
Partition mirror_test_split(const Partition &part, const Dataset &test_pool,
                            RngStream stream);

// Floor each share * total, then hand the remainder out by decreasing
// fractional part (ties to the lower index). Result sums to `total`.
std::vector<std::size_t> round_allocation(const std::vector<double> &shares,
                                          std::size_t total);

// Throws InvalidArgument when a Partition invariant is violated.
void validate_partition(const Partition &part, const Dataset &pool);

// Rows "split,client,pool_index" with split in {train,injected,test}.
void write_partition_assignment(std::ostream &out, const Partition &part);

}  // namespace fedsynth

#endif  // FEDSYNTH_PARTITION_H_
