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

// Test-side generators and oracles. Nothing here calls the library's own
// similarity or counting code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <memory>
#include <random>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dynsim/level_sketch.hpp"
#include "dynsim/similarity.hpp"

namespace dynsim::testing {

inline std::vector<Item> distinct_items(std::mt19937_64& rng, std::size_t count, std::uint64_t d) {
  std::unordered_set<Item> seen;
  std::vector<Item> out;
  out.reserve(count);
  std::uniform_int_distribution<std::uint64_t> pick(0, d - 1);
  while (out.size() < count) {
    const auto item = static_cast<Item>(pick(rng));
    if (seen.insert(item).second) out.push_back(item);
  }
  return out;
}

inline ItemSet random_set(std::mt19937_64& rng, std::size_t size, std::uint64_t d) {
  return ItemSet(distinct_items(rng, size, d));
}

/// Sets with |A| = size_a, |B| = size_b and |A∩B| = shared.
inline std::pair<ItemSet, ItemSet> planted_pair(std::mt19937_64& rng, std::size_t size_a,
                                                std::size_t size_b, std::size_t shared,
                                                std::uint64_t d) {
  auto items = distinct_items(rng, size_a + size_b - shared, d);
  std::vector<Item> a(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(size_a));
  std::vector<Item> b(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(shared));
  b.insert(b.end(), items.begin() + static_cast<std::ptrdiff_t>(size_a), items.end());
  return {ItemSet(std::move(a)), ItemSet(std::move(b))};
}

/// Equal-size pair with Jaccard distance as close to `distance` as integers allow.
inline std::pair<ItemSet, ItemSet> pair_at_distance(std::mt19937_64& rng, std::size_t size,
                                                    double distance, std::uint64_t d) {
  // J = m / (2·size − m)  =>  m = 2·size·J / (1 + J)
  const double j = 1 - distance;
  const auto shared = static_cast<std::size_t>(std::llround(2.0 * size * j / (1 + j)));
  return planted_pair(rng, size, size, shared, d);
}

inline std::size_t intersection_size(const ItemSet& a, const ItemSet& b) {
  std::vector<Item> out;
  std::set_intersection(a.members().begin(), a.members().end(), b.members().begin(),
                        b.members().end(), std::back_inserter(out));
  return out.size();
}

inline double jaccard_oracle(const ItemSet& a, const ItemSet& b) {
  const double both = static_cast<double>(intersection_size(a, b));
  const double either = static_cast<double>(a.size() + b.size()) - both;
  return either == 0 ? 1.0 : both / either;
}

inline LevelSketch sketch_of(const std::shared_ptr<const SketchRandomness>& randomness,
                             std::uint64_t buckets, const ItemSet& set) {
  LevelSketch sketch(randomness, buckets);
  for (Item i : set.members()) sketch.insert(i);
  return sketch;
}

/// Pr[Binomial(n, p) ≥ k], summed term by term.
inline double binomial_upper_tail(int n, double p, int k) {
  double total = 0;
  for (int i = k; i <= n; ++i) {
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                      i * std::log(p) + (n - i) * std::log1p(-p));
  }
  return total;
}

/// 1 − (1 − s^r)^l, evaluated directly.
inline double banding_oracle(double s, int r, int l) {
  return 1 - std::pow(1 - std::pow(s, r), l);
}

}  // namespace dynsim::testing
