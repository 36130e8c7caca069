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

#include "fedsynth/partition.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fedsynth/error.h"

namespace fedsynth {

namespace {

Partition empty_partition(const Dataset &pool, int client_count) {
  Partition part;
  part.client_count = client_count;
  part.class_count = pool.class_count();
  part.pool_class_counts = pool.label_histogram();
  const auto m = static_cast<std::size_t>(client_count);
  part.train_indices.resize(m);
  part.injected_indices.resize(m);
  part.histograms.assign(m, LabelHistogram(static_cast<std::size_t>(pool.class_count()), 0));
  return part;
}

void recount(Partition &part, const Dataset &pool) {
  for (int m = 0; m < part.client_count; ++m) {
    auto &hist = part.histograms[static_cast<std::size_t>(m)];
    std::fill(hist.begin(), hist.end(), 0);
    for (std::size_t i : part.client_train_indices(m)) {
      ++hist[static_cast<std::size_t>(pool.label(i))];
    }
  }
}

std::vector<double> dirichlet(std::size_t k, double beta, RngStream &stream) {
  std::vector<double> logs(k);
  for (double &v : logs) v = stream.log_gamma(beta);
  double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> p(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = std::exp(logs[i] - top);
    total += p[i];
  }
  for (double &v : p) v /= total;
  return p;
}

}  // namespace

IndexList Partition::client_train_indices(int client) const {
  const auto m = static_cast<std::size_t>(client);
  IndexList out = train_indices[m];
  out.insert(out.end(), injected_indices[m].begin(), injected_indices[m].end());
  return out;
}

std::vector<std::size_t> round_allocation(const std::vector<double> &shares,
                                          std::size_t total) {
  std::vector<std::size_t> counts(shares.size(), 0);
  std::vector<double> frac(shares.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    double exact = shares[i] * static_cast<double>(total);
    double whole = std::floor(exact);
    counts[i] = static_cast<std::size_t>(whole);
    frac[i] = exact - whole;
    assigned += counts[i];
  }
  // Rounding error in the shares can overshoot by one; trim from the
  // smallest fractional parts first.
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; assigned < total; ++r) {
    ++counts[order[r % order.size()]];
    ++assigned;
  }
  for (std::size_t r = order.size(); assigned > total && r > 0; --r) {
    std::size_t i = order[r - 1];
    if (counts[i] > 0) {
      --counts[i];
      --assigned;
    }
  }
  return counts;
}

Partition dirichlet_partition(const Dataset &pool, int client_count, double beta,
                              RngStream stream, DirichletOptions options) {
  if (client_count < 1) throw InvalidArgument("dirichlet_partition: M must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("dirichlet_partition: beta must be > 0");
  }
  if (pool.empty()) throw InvalidArgument("dirichlet_partition: pool is empty");

  const auto m = static_cast<std::size_t>(client_count);
  const int classes = pool.class_count();
  constexpr int kMaxRedraws = 100;

  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    Partition part = empty_partition(pool, client_count);
    RngStream draw = stream.derive({static_cast<std::uint64_t>(attempt)});
    for (int k = 0; k < classes; ++k) {
      IndexList members = pool.indices_of_class(k);
      draw.shuffle(std::span(members));
      std::vector<double> share = dirichlet(m, beta, draw);
      std::vector<std::size_t> counts = round_allocation(share, members.size());
      std::size_t offset = 0;
      for (std::size_t c = 0; c < m; ++c) {
        auto &dst = part.train_indices[c];
        dst.insert(dst.end(), members.begin() + static_cast<std::ptrdiff_t>(offset),
                   members.begin() + static_cast<std::ptrdiff_t>(offset + counts[c]));
        offset += counts[c];
      }
    }
    recount(part, pool);
    bool has_empty = std::any_of(part.train_indices.begin(), part.train_indices.end(),
                                 [](const IndexList &l) { return l.empty(); });
    if (!options.strict_nonempty || !has_empty) return part;
  }
  throw InvalidArgument(
      "dirichlet_partition: some client stayed empty after 100 redraws (strict mode)");
}

Partition single_label_partition(const Dataset &pool, RngStream stream) {
  const int classes = pool.class_count();
  Partition part = empty_partition(pool, classes);
  for (int k = 0; k < classes; ++k) {
    IndexList members = pool.indices_of_class(k);
    stream.shuffle(std::span(members));
    part.train_indices[static_cast<std::size_t>(k)] = std::move(members);
  }
  recount(part, pool);
  return part;
}

Partition iid_partition(const Dataset &pool, int client_count, RngStream stream) {
  if (client_count < 1) throw InvalidArgument("iid_partition: M must be >= 1");
  Partition part = empty_partition(pool, client_count);
  const auto m = static_cast<std::size_t>(client_count);
  for (int k = 0; k < pool.class_count(); ++k) {
    IndexList members = pool.indices_of_class(k);
    stream.shuffle(std::span(members));
    // Rotate who gets the remainder so client totals stay balanced too.
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::size_t client = (i + static_cast<std::size_t>(k)) % m;
      part.train_indices[client].push_back(members[i]);
    }
  }
  recount(part, pool);
  return part;
}

Partition inject_global_fraction(const Partition &part, const Dataset &pool,
                                 double rho, RngStream stream) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw InvalidArgument("inject_global_fraction: rho must lie in [0, 1]");
  }
  if (rho == 0.0) return part;
  Partition out = part;
  for (int k = 0; k < pool.class_count(); ++k) {
    const IndexList members = pool.indices_of_class(k);
    const auto take = static_cast<std::size_t>(
        std::floor(rho * static_cast<double>(members.size())));
    for (int c = 0; c < out.client_count; ++c) {
      RngStream draw = stream.derive({static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(c)});
      IndexList picked = members;
      // Partial Fisher-Yates: first `take` entries form a uniform sample.
      for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + static_cast<std::size_t>(draw.uniform_index(picked.size() - i));
        std::swap(picked[i], picked[j]);
      }
      auto &dst = out.injected_indices[static_cast<std::size_t>(c)];
      dst.insert(dst.end(), picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(take));
    }
  }
  recount(out, pool);
  return out;
}

Partition mirror_test_split(const Partition &part, const Dataset &test_pool,
                            RngStream stream) {
  Partition out = part;
  const auto m = static_cast<std::size_t>(part.client_count);
  out.test_indices.assign(m, {});
  out.test_scale.assign(static_cast<std::size_t>(part.class_count), 1.0);
  for (int k = 0; k < part.class_count; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    IndexList members = test_pool.indices_of_class(k);
    const std::size_t n_train = part.pool_class_counts[ks];
    std::size_t held = 0;
    for (std::size_t c = 0; c < m; ++c) held += part.histograms[c][ks];
    std::vector<std::size_t> counts(m, 0);
    if (n_train > 0 && held > 0) {
      // Client c wants hist * n_test / n_train samples. Without injection the
      // wanted total is exactly the class's test count; with injection it can
      // exceed it, and every client is scaled by the same factor.
      const double wanted = static_cast<double>(held) * static_cast<double>(members.size()) /
                            static_cast<double>(n_train);
      std::size_t total = static_cast<std::size_t>(std::llround(wanted));
      if (total > members.size()) {
        total = members.size();
        out.test_scale[ks] = static_cast<double>(total) / wanted;
      }
      std::vector<double> share(m);
      for (std::size_t c = 0; c < m; ++c) {
        share[c] = static_cast<double>(part.histograms[c][ks]) / static_cast<double>(held);
      }
      counts = round_allocation(share, total);
    }
    stream.shuffle(std::span(members));
    std::size_t offset = 0;
    for (std::size_t c = 0; c < m; ++c) {
      auto &dst = out.test_indices[c];
      dst.insert(dst.end(), members.begin() + static_cast<std::ptrdiff_t>(offset),
                 members.begin() + static_cast<std::ptrdiff_t>(offset + counts[c]));
      offset += counts[c];
    }
  }
  return out;
}

void validate_partition(const Partition &part, const Dataset &pool) {
  const auto m = static_cast<std::size_t>(part.client_count);
  if (part.train_indices.size() != m || part.injected_indices.size() != m ||
      part.histograms.size() != m) {
    throw InvalidArgument("partition: per-client vectors have wrong length");
  }
  std::vector<char> seen(pool.size(), 0);
  for (std::size_t c = 0; c < m; ++c) {
    LabelHistogram hist(static_cast<std::size_t>(pool.class_count()), 0);
    for (std::size_t i : part.train_indices[c]) {
      if (i >= pool.size()) throw InvalidArgument("partition: index out of range");
      if (seen[i]) throw InvalidArgument("partition: train index assigned twice");
      seen[i] = 1;
      ++hist[static_cast<std::size_t>(pool.label(i))];
    }
    for (std::size_t i : part.injected_indices[c]) {
      if (i >= pool.size()) throw InvalidArgument("partition: index out of range");
      ++hist[static_cast<std::size_t>(pool.label(i))];
    }
    if (hist != part.histograms[c]) {
      throw InvalidArgument("partition: histogram does not match indices");
    }
  }
  if (!part.test_indices.empty()) {
    std::vector<char> test_seen;
    for (const auto &list : part.test_indices) {
      for (std::size_t i : list) {
        if (i >= test_seen.size()) test_seen.resize(i + 1, 0);
        if (test_seen[i]) throw InvalidArgument("partition: test index assigned twice");
        test_seen[i] = 1;
      }
    }
  }
}

void write_partition_assignment(std::ostream &out, const Partition &part) {
  out << "split,client,pool_index\n";
  auto emit = [&](const char *split, const std::vector<IndexList> &lists) {
    for (std::size_t c = 0; c < lists.size(); ++c) {
      for (std::size_t i : lists[c]) out << split << ',' << c << ',' << i << '\n';
    }
  };
  emit("train", part.train_indices);
  emit("injected", part.injected_indices);
  emit("test", part.test_indices);
}

}  // namespace fedsynth
