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

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dynsim {

using Item = std::uint32_t;

/// The rational set similarity family
///
///   S(A,B) = (x|A∩B| + y|~(A∪B)| + z|A△B|) / (x|A∩B| + y|~(A∪B)| + z'|A△B|)
///
/// over subsets of a universe of `d` items, with S = 1 whenever the
/// denominator vanishes. Jaccard is (1,0,0,1). Parameters are not normalized;
/// every formula here is invariant under scaling all four coefficients.
class RationalSimilarity {
 public:
  RationalSimilarity(double x, double y, double z, double z_prime, std::uint64_t d);

  static RationalSimilarity jaccard(std::uint64_t d) { return {1, 0, 0, 1, d}; }
  static RationalSimilarity hamming(std::uint64_t d) { return {1, 1, 0, 1, d}; }
  static RationalSimilarity anderberg(std::uint64_t d) { return {1, 0, 0, 2, d}; }
  static RationalSimilarity rogers_tanimoto(std::uint64_t d) { return {1, 1, 0, 2, d}; }
  static RationalSimilarity sorensen_dice(std::uint64_t d) { return {2, 0, 0, 1, d}; }

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }
  double z_prime() const noexcept { return z_prime_; }
  std::uint64_t universe_size() const noexcept { return d_; }

  RationalSimilarity scaled(double factor) const;
  RationalSimilarity with_universe(std::uint64_t d) const { return {x_, y_, z_, z_prime_, d}; }

 private:
  double x_, y_, z_, z_prime_;
  std::uint64_t d_;
};

/// The well-known members of the family, recognized up to scaling.
enum class NamedSimilarity { kJaccard, kHamming, kAnderberg, kRogersTanimoto };

std::optional<NamedSimilarity> classify(const RationalSimilarity& params);
std::string_view to_string(NamedSimilarity kind);

/// S^α := 1 − (1 − S)^α with α in (0, 1].
class RootSimilarity {
 public:
  RootSimilarity(RationalSimilarity base, double alpha);

  const RationalSimilarity& base() const noexcept { return base_; }
  double alpha() const noexcept { return alpha_; }

 private:
  RationalSimilarity base_;
  double alpha_;
};

/// A sorted, duplicate-free set of item identifiers.
class ItemSet {
 public:
  ItemSet() = default;
  ItemSet(std::initializer_list<Item> items);
  explicit ItemSet(std::vector<Item> items);

  std::span<const Item> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(Item item) const;

  /// Throws InputError unless every member is below `d`.
  void validate(std::uint64_t d) const;

  friend bool operator==(const ItemSet&, const ItemSet&) = default;

 private:
  std::vector<Item> members_;
};

/// Pairwise cell counts of two sets. Real-valued so that a sampled universe
/// can stand in for d.
struct Overlap {
  double intersection = 0;
  double complement = 0;  // |~(A∪B)|
  double symmetric_difference = 0;
};

Overlap overlap(const ItemSet& a, const ItemSet& b, std::uint64_t d);

double numerator(const RationalSimilarity& params, const Overlap& cells);
double denominator(const RationalSimilarity& params, const Overlap& cells);

/// N/D, or 1 when D = 0.
double rational_similarity(const RationalSimilarity& params, const Overlap& cells);

double exact_similarity(const RationalSimilarity& params, const ItemSet& a, const ItemSet& b);
double exact_distance(const RationalSimilarity& params, const ItemSet& a, const ItemSet& b);
double exact_root_distance(const RootSimilarity& root, const ItemSet& a, const ItemSet& b);

/// 1 − S is a metric iff z' ≥ max(x, y, z).
bool is_metric(const RationalSimilarity& params) noexcept;

/// The root similarity admits an LSH iff z' ≥ (α+1)/2 · max(x, y) and z' ≥ z.
bool is_root_lshable(const RootSimilarity& root) noexcept;

}  // namespace dynsim
