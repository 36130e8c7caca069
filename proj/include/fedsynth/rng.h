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

#ifndef FEDSYNTH_RNG_H_
#define FEDSYNTH_RNG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fedsynth {

// Purpose tags used as path components so that streams for different jobs
// never collide even when the numeric ids coincide.
enum class StreamTag : std::uint64_t {
  kWorld = 0x57,
  kClassMeans,
  kClassStd,
  kTrainPool,
  kTestPool,
  kFoundationPool,
  kPartition,
  kInjection,
  kMirror,
  kInit,
  kSynthesis,
  kRound,
  kSelection,
  kClient,
  kPersonalization,
  kCentralized,
  kSweep,
  kUser,
};

constexpr std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

/*
 * Counter-based random stream (Philox4x32-10).
 *
 * The 64-bit key and the upper half of the 128-bit counter are derived from
 * (root_seed, path). Block i of the stream is philox(key, {path_hash, i}),
 * so output depends only on the identity of the stream and on how many values
 * were consumed from it, never on which thread or in what order other streams
 * were used.
 *
 * A stream is a value: copying it forks an identical sequence. It is meant
 * to be consumed by one task at a time.
 */
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::vector<std::uint64_t> path);

  // Child stream with `more` appended to the path. Does not consume from
  // this stream.
  RngStream derive(std::initializer_list<std::uint64_t> more) const;

  std::uint64_t root_seed() const { return root_seed_; }
  const std::vector<std::uint64_t> &path() const { return path_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1); 53 bits of resolution.
  double uniform();
  // Standard normal (Box-Muller, second variate cached).
  double normal();
  // log of a Gamma(shape, 1) variate. Computed in log space so that tiny
  // shapes (Dirichlet with beta = 0.01) do not underflow to zero.
  double log_gamma(double shape);
  // Uniform integer in [0, n), unbiased. n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint32_t next_u32();
  void refill();

  std::uint64_t root_seed_;
  std::vector<std::uint64_t> path_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t counter_hi_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  std::optional<double> cached_normal_;
};

RngStream derive_stream(std::uint64_t root_seed,
                        std::span<const std::uint64_t> path);

std::vector<double> standard_normal_vector(RngStream &stream, std::size_t d);

// splitmix64 finalizer, exposed for seed derivation (sweeps, tests).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root_seed,
                          std::initializer_list<std::uint64_t> path);

}  // namespace fedsynth

#endif  // FEDSYNTH_RNG_H_
