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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "fedsynth/config.h"
#include "fedsynth/error.h"
#include "fedsynth/experiment.h"
#include "fedsynth/partition.h"

#ifndef FEDSYNTH_TEST_DATA_DIR
#define FEDSYNTH_TEST_DATA_DIR "."
#endif

namespace fedsynth {
namespace {

// Labels only matter for partitioning; features are a constant.
Dataset label_pool(int classes, std::size_t per_class) {
  Dataset d(classes, 1);
  for (std::size_t i = 0; i < per_class * static_cast<std::size_t>(classes); ++i) {
    d.add(std::vector<double>{0.0}, static_cast<int>(i % static_cast<std::size_t>(classes)));
  }
  return d;
}

double max_share(const Partition &p, int k) {
  std::size_t top = 0;
  for (const auto &h : p.histograms) top = std::max(top, h[static_cast<std::size_t>(k)]);
  return static_cast<double>(top) / static_cast<double>(p.pool_class_counts[k]);
}

// Independent Dirichlet oracle on the standard library: Gamma(beta + 1) * U^(1/beta)
// in log space, normalized.
double oracle_mean_max_share(double beta, int m, int draws) {
  std::mt19937_64 gen(12345);
  std::gamma_distribution<double> gamma(beta + 1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double total = 0;
  for (int t = 0; t < draws; ++t) {
    std::vector<double> logs(m);
    for (auto &l : logs) l = std::log(gamma(gen)) + std::log(1.0 - unif(gen)) / beta;
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0;
    for (double l : logs) sum += std::exp(l - top);
    total += 1.0 / sum;
  }
  return total / draws;
}

TEST(RoundAllocation, ConservesAndFollowsLargestRemainder) {
  EXPECT_EQ(round_allocation({0.5, 0.3, 0.2}, 10), (std::vector<std::size_t>{5, 3, 2}));
  EXPECT_EQ(round_allocation({0.34, 0.33, 0.33}, 10), (std::vector<std::size_t>{4, 3, 3}));
  // Equal fractions: ties go to the lower index.
  EXPECT_EQ(round_allocation({0.25, 0.25, 0.25, 0.25}, 3),
            (std::vector<std::size_t>{1, 1, 1, 0}));
  RngStream s(1, {tag(StreamTag::kUser)});
  for (int t = 0; t < 200; ++t) {
    std::vector<double> share(1 + s.uniform_index(8));
    double sum = 0;
    for (auto &v : share) sum += (v = s.uniform());
    for (auto &v : share) v /= sum;
    const std::size_t total = s.uniform_index(1000);
    auto counts = round_allocation(share, total);
    ASSERT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), total);
    for (std::size_t i = 0; i < share.size(); ++i) {
      ASSERT_LE(std::abs(static_cast<double>(counts[i]) - share[i] * total), 1.0 + 1e-9);
    }
  }
}

TEST(DirichletPartition, ConservesEveryClassAndIsDisjoint) {
  Dataset pool = label_pool(10, 200);
  for (double beta : {0.01, 0.5, 1000.0}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Partition p = dirichlet_partition(pool, 5, beta, RngStream(seed, {}));
      EXPECT_NO_THROW(validate_partition(p, pool));
      for (int k = 0; k < 10; ++k) {
        std::size_t sum = 0;
        for (const auto &h : p.histograms) sum += h[k];
        EXPECT_EQ(sum, 200u);
      }
      std::size_t assigned = 0;
      for (const auto &l : p.train_indices) assigned += l.size();
      EXPECT_EQ(assigned, pool.size());
    }
  }
}

TEST(DirichletPartition, TinyBetaConcentratesOnOneClient) {
  // At beta = 0.01 a class lands almost entirely on one client most of the
  // time; a split between two clients is possible but rare.
  Dataset pool = label_pool(10, 200);
  int concentrated = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Partition p = dirichlet_partition(pool, 5, 0.01, RngStream(seed, {}));
    for (int k = 0; k < 10; ++k) concentrated += max_share(p, k) >= 0.95;
  }
  EXPECT_GE(concentrated, 160);
}

TEST(DirichletPartition, MaxShareMatchesIndependentOracle) {
  Dataset pool = label_pool(1, 100000);
  const int draws = 400;
  double ours = 0;
  for (int t = 0; t < draws; ++t) {
    ours += max_share(dirichlet_partition(pool, 5, 0.5, RngStream(t, {})), 0);
  }
  ours /= draws;
  const double oracle = oracle_mean_max_share(0.5, 5, 200000);
  // Max share has std below 0.25, so 4 standard errors over 400 draws is 0.05.
  EXPECT_NEAR(ours, oracle, 0.05);
}

TEST(DirichletPartition, StrictModeAvoidsEmptyClients) {
  Dataset pool = label_pool(10, 200);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Partition p = dirichlet_partition(pool, 5, 0.01, RngStream(seed, {}), {true});
    for (const auto &l : p.train_indices) EXPECT_FALSE(l.empty());
  }
  // Ten clients but only one class to hand out: cannot be satisfied.
  EXPECT_THROW(dirichlet_partition(label_pool(1, 5), 10, 0.01, RngStream(1, {}), {true}),
               InvalidArgument);
}

TEST(DirichletPartition, RejectsBadArguments) {
  Dataset pool = label_pool(2, 10);
  EXPECT_THROW(dirichlet_partition(pool, 0, 0.5, RngStream(1, {})), InvalidArgument);
  EXPECT_THROW(dirichlet_partition(pool, 2, 0.0, RngStream(1, {})), InvalidArgument);
  EXPECT_THROW(dirichlet_partition(pool, 2, -1.0, RngStream(1, {})), InvalidArgument);
}

TEST(SingleLabelPartition, OneClassPerClient) {
  Dataset pool = label_pool(10, 20);
  Partition p = single_label_partition(pool, RngStream(1, {}));
  ASSERT_EQ(p.client_count, 10);
  for (int m = 0; m < 10; ++m) {
    for (int k = 0; k < 10; ++k) EXPECT_EQ(p.histograms[m][k], m == k ? 20u : 0u);
  }
  EXPECT_NO_THROW(validate_partition(p, pool));
}

TEST(IidPartition, BalancedWithinOne) {
  Dataset pool = label_pool(10, 203);
  Partition p = iid_partition(pool, 5, RngStream(2, {}));
  EXPECT_NO_THROW(validate_partition(p, pool));
  for (const auto &h : p.histograms) {
    for (int k = 0; k < 10; ++k) {
      EXPECT_GE(h[k], 40u);
      EXPECT_LE(h[k], 41u);
    }
  }
}

TEST(Injection, AddsFloorRhoTimesClassCount) {
  Dataset pool = label_pool(10, 200);
  Partition base = dirichlet_partition(pool, 5, 0.01, RngStream(4, {}));
  EXPECT_EQ(inject_global_fraction(base, pool, 0.0, RngStream(1, {})), base);
  Partition p = inject_global_fraction(base, pool, 0.05, RngStream(1, {}));
  EXPECT_NO_THROW(validate_partition(p, pool));
  for (int m = 0; m < 5; ++m) {
    for (int k = 0; k < 10; ++k) {
      EXPECT_EQ(p.histograms[m][k], base.histograms[m][k] + 10u);
    }
    std::set<std::size_t> unique(p.injected_indices[m].begin(), p.injected_indices[m].end());
    EXPECT_EQ(unique.size(), p.injected_indices[m].size());
  }
  EXPECT_EQ(p.train_indices, base.train_indices);
  EXPECT_THROW(inject_global_fraction(base, pool, 1.5, RngStream(1, {})), InvalidArgument);
  EXPECT_THROW(inject_global_fraction(base, pool, -0.1, RngStream(1, {})), InvalidArgument);
}

TEST(MirrorTestSplit, ProportionalToTrainShares) {
  Dataset train = label_pool(10, 200);
  Dataset test = label_pool(10, 100);
  Partition base = dirichlet_partition(train, 5, 0.5, RngStream(5, {}));
  Partition p = mirror_test_split(base, test, RngStream(6, {}));
  EXPECT_NO_THROW(validate_partition(p, train));
  for (int m = 0; m < 5; ++m) {
    LabelHistogram hist(10, 0);
    for (std::size_t i : p.test_indices[m]) ++hist[test.label(i)];
    for (int k = 0; k < 10; ++k) {
      EXPECT_LE(std::abs(static_cast<double>(hist[k]) - base.histograms[m][k] * 0.5), 0.5 + 1e-9);
    }
  }
  for (double s : p.test_scale) EXPECT_EQ(s, 1.0);
}

TEST(MirrorTestSplit, ScalesDownWhenInjectionOverdraws) {
  Dataset train = label_pool(4, 100);
  Dataset test = label_pool(4, 50);
  Partition base = iid_partition(train, 4, RngStream(1, {}));
  Partition inj = inject_global_fraction(base, train, 0.5, RngStream(2, {}));
  Partition p = mirror_test_split(inj, test, RngStream(3, {}));
  for (int k = 0; k < 4; ++k) {
    std::size_t used = 0;
    for (const auto &l : p.test_indices) {
      for (std::size_t i : l) used += test.label(i) == k;
    }
    EXPECT_LE(used, 50u);
    EXPECT_LT(p.test_scale[k], 1.0);
  }
  EXPECT_NO_THROW(validate_partition(p, train));
}

TEST(PartitionReport, DirichletTinyBetaMatchesGolden) {
  ExperimentConfig cfg;
  cfg.seed = 7;
  cfg.beta = 0.01;
  const auto dir = std::filesystem::temp_directory_path() / "fedsynth_partition_golden";
  const auto path = (dir / "partition.csv").string();
  write_partition_report(cfg, path);
  std::ifstream got_in(path), want_in(std::string(FEDSYNTH_TEST_DATA_DIR) +
                                      "/golden/partition_dirichlet_b0.01_seed7.csv");
  ASSERT_TRUE(want_in) << "golden file missing";
  std::stringstream got, want;
  got << got_in.rdbuf();
  want << want_in.rdbuf();
  EXPECT_EQ(got.str(), want.str());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fedsynth
