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

#include "dynsim/hashing.hpp"

#include "dynsim/errors.hpp"

namespace dynsim {

namespace {

// Stream tags keep the derived families disjoint.
constexpr std::uint64_t kLevelStream = 1;
constexpr std::uint64_t kBucketStream = 2;
constexpr std::uint64_t kMinHashStream = 3;

constexpr int kBucketHashBits = 32;

}  // namespace

HashSpec::HashSpec(std::uint64_t a, std::uint64_t b, int output_bits)
    : a(a), b(b), output_bits(output_bits) {
  if ((a & 1U) == 0) throw InputError("multiply-shift multiplier must be odd");
  if (output_bits < 1 || output_bits > kWordBits) {
    throw InputError("hash output bits must lie in [1, 64]");
  }
}

HashSpec derive_hash_spec(std::uint64_t master, std::uint64_t stream, std::uint64_t index,
                          int output_bits) {
  const std::uint64_t state = splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
  const std::uint64_t a = splitmix64(state) | 1U;
  const std::uint64_t b = splitmix64(state + 1);
  return {a, b, output_bits};
}

SketchRandomness::SketchRandomness(std::uint64_t d, std::uint64_t master_seed)
    : d_(d), master_seed_(master_seed) {
  if (d == 0) throw InputError("universe size must be positive");
  if (d > (std::uint64_t{1} << 32)) throw InputError("universe size must not exceed 2^32");
  const int max_level = ceil_log2(d);
  // h maps into [2^max_level]; at least one bit so that d = 1 stays valid.
  level_hash_ = derive_hash_spec(master_seed, kLevelStream, 0, max_level > 0 ? max_level : 1);
  bucket_hashes_.reserve(static_cast<std::size_t>(max_level) + 1);
  for (int k = 0; k <= max_level; ++k) {
    bucket_hashes_.push_back(
        derive_hash_spec(master_seed, kBucketStream, static_cast<std::uint64_t>(k), kBucketHashBits));
  }
}

HashSpec SketchRandomness::minhash_seed(std::uint64_t slot, int level) const {
  const auto index = slot * static_cast<std::uint64_t>(levels()) + static_cast<std::uint64_t>(level);
  return derive_hash_spec(master_seed_, kMinHashStream, index, kWordBits);
}

namespace {

template <typename Key>
std::uint64_t minhash_over(std::span<const Key> keys, const HashSpec& seed) {
  std::uint64_t best = kEmptySignature;
  std::uint64_t best_hash = 0;
  for (Key key : keys) {
    const auto h = scrambled_hash(seed, key);
    if (best == kEmptySignature || h < best_hash) {
      best = key;
      best_hash = h;
    }
  }
  return best;
}

}  // namespace

std::uint64_t minhash_signature(std::span<const Item> items, const HashSpec& seed) {
  return minhash_over(items, seed);
}

std::uint64_t minhash_signature(std::span<const std::uint64_t> positions, const HashSpec& seed) {
  return minhash_over(positions, seed);
}

}  // namespace dynsim
