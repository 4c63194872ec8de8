/*
 *   Copyright 2026 The dynsim Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dynsim/similarity.hpp"

namespace dynsim {

inline constexpr int kWordBits = 64;

/// One member of the multiply-add-shift family
///   h(x) = ((a·x + b) mod 2^64) >> (64 − output_bits)
/// with `a` odd. Strongly universal for keys below 2^32 and outputs of at
/// most 32 bits; with 64 output bits it is a bijection on 64-bit keys.
struct HashSpec {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  int output_bits = kWordBits;

  HashSpec() = default;
  HashSpec(std::uint64_t a, std::uint64_t b, int output_bits);

  friend bool operator==(const HashSpec&, const HashSpec&) = default;
};

constexpr std::uint64_t hash(const HashSpec& spec, std::uint64_t key) noexcept {
  const std::uint64_t mixed = spec.a * key + spec.b;
  return spec.output_bits == kWordBits ? mixed : mixed >> (kWordBits - spec.output_bits);
}

/// Index of the least significant set bit; `zero_level` for 0.
constexpr int lsb(std::uint64_t value, int zero_level) noexcept {
  return value == 0 ? zero_level : std::countr_zero(value);
}

/// ⌈log2 d⌉ for d ≥ 1.
constexpr int ceil_log2(std::uint64_t d) noexcept {
  return d <= 1 ? 0 : kWordBits - std::countl_zero(d - 1);
}

/// Levels 0..⌈log2 d⌉ of the lsb sampling scheme.
constexpr int level_count(std::uint64_t d) noexcept { return ceil_log2(d) + 1; }

/// Maps a 32-bit hash onto [0, range) by the multiply-high reduction.
constexpr std::uint64_t reduce(std::uint64_t hash32, std::uint64_t range) noexcept {
  return (hash32 * range) >> 32;
}

/// splitmix64 output for `state`; the seed splitter for all randomness.
constexpr std::uint64_t splitmix64(std::uint64_t state) noexcept {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// hash(spec, σ(key)) for the fixed bijection σ = splitmix64. Consecutive
/// keys otherwise map onto a lattice and pile into few buckets; composing
/// with a fixed injection keeps the family 2-universal.
constexpr std::uint64_t scrambled_hash(const HashSpec& spec, std::uint64_t key) noexcept {
  return hash(spec, splitmix64(key));
}

/// A hash spec drawn deterministically from (master, stream, index).
HashSpec derive_hash_spec(std::uint64_t master, std::uint64_t stream, std::uint64_t index,
                          int output_bits);

/// Randomness shared by every sketch of one index: the level hash h: [d] → [2^⌈log2 d⌉],
/// one bucket hash per level, and min-hash seeds addressed by (slot, level).
/// Immutable once built.
class SketchRandomness {
 public:
  SketchRandomness(std::uint64_t d, std::uint64_t master_seed);

  std::uint64_t universe_size() const noexcept { return d_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  int max_level() const noexcept { return static_cast<int>(bucket_hashes_.size()) - 1; }
  int levels() const noexcept { return static_cast<int>(bucket_hashes_.size()); }

  const HashSpec& level_hash() const noexcept { return level_hash_; }
  std::span<const HashSpec> bucket_hashes() const noexcept { return bucket_hashes_; }

  int level_of(Item item) const noexcept {
    const int k = lsb(scrambled_hash(level_hash_, item), max_level());
    return k < max_level() ? k : max_level();
  }

  std::uint64_t bucket_of(int level, Item item, std::uint64_t buckets) const noexcept {
    return reduce(scrambled_hash(bucket_hashes_[static_cast<std::size_t>(level)], item), buckets);
  }

  /// Min-hash seed for repetition/band `slot` at `level`; distinct per pair.
  HashSpec minhash_seed(std::uint64_t slot, int level) const;

  friend bool operator==(const SketchRandomness& lhs, const SketchRandomness& rhs) noexcept {
    return lhs.d_ == rhs.d_ && lhs.master_seed_ == rhs.master_seed_;
  }

 private:
  std::uint64_t d_;
  std::uint64_t master_seed_;
  HashSpec level_hash_;
  std::vector<HashSpec> bucket_hashes_;
};

inline constexpr std::uint64_t kEmptySignature = std::numeric_limits<std::uint64_t>::max();

/// Position of the nonzero entry minimizing scrambled_hash(seed, position), or
/// kEmptySignature for an all-zero vector. Only the nonzero pattern matters.
template <typename Derived>
std::uint64_t minhash_signature(const Eigen::DenseBase<Derived>& buckets, const HashSpec& seed) {
  std::uint64_t best = kEmptySignature;
  std::uint64_t best_hash = std::numeric_limits<std::uint64_t>::max();
  for (Eigen::Index l = 0; l < buckets.size(); ++l) {
    if (buckets(l) == 0) continue;
    const auto h = scrambled_hash(seed, static_cast<std::uint64_t>(l));
    if (best == kEmptySignature || h < best_hash) {
      best = static_cast<std::uint64_t>(l);
      best_hash = h;
    }
  }
  return best;
}

/// Min-hash over explicit items; kEmptySignature for the empty set.
std::uint64_t minhash_signature(std::span<const Item> items, const HashSpec& seed);
std::uint64_t minhash_signature(std::span<const std::uint64_t> positions, const HashSpec& seed);

/// Indices of the nonzero entries, ascending.
template <typename Derived>
std::vector<std::uint64_t> nonzero_positions(const Eigen::DenseBase<Derived>& values) {
  std::vector<std::uint64_t> out;
  for (Eigen::Index l = 0; l < values.size(); ++l) {
    if (values(l) != 0) out.push_back(static_cast<std::uint64_t>(l));
  }
  return out;
}

}  // namespace dynsim
