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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dynsim/errors.hpp"
#include "dynsim/level_sketch.hpp"
#include "dynsim/similarity.hpp"

namespace dynsim {

/// Median of `repetitions` evaluations of single_shot(rep), rep = 0, 1, ...
template <typename SingleShot>
double median_amplify(SingleShot&& single_shot, std::size_t repetitions) {
  if (repetitions == 0 || repetitions % 2 == 0) {
    throw InputError("median amplification needs an odd number of repetitions");
  }
  std::vector<double> values;
  values.reserve(repetitions);
  for (std::size_t rep = 0; rep < repetitions; ++rep) values.push_back(single_shot(rep));
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(repetitions / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

/// Distance estimates 1 − S (and (1 − S)^α for root similarities) from pairs
/// of sketches via distinct-count estimates of a + b and a − b.
///
/// With x ≥ y the denominator is rewritten as
///   D = y·d + (x − y)·|A∪B| + (z' − x)·|A△B|
/// and with x < y through complements, which are linear in the sketch:
///   D = (y − x)·|~A ∪ ~B| + x·d + (z' − y)·|A△B|.
/// The numerator of the distance is always (z' − z)·|A△B| = (z' − z)·ℓ0(a − b).
///
/// Each repetition owns its own randomness; an item set is represented by
/// one sketch per repetition and pairwise queries take the median.
template <typename Counter>
class BasicDistanceEstimator {
 public:
  using Sketch = BasicLevelSketch<Counter>;

  BasicDistanceEstimator(RationalSimilarity params,
                         std::vector<std::shared_ptr<const SketchRandomness>> randomness,
                         std::uint64_t buckets)
      : BasicDistanceEstimator(params, std::nullopt, std::move(randomness), buckets) {}

  BasicDistanceEstimator(RootSimilarity root,
                         std::vector<std::shared_ptr<const SketchRandomness>> randomness,
                         std::uint64_t buckets)
      : BasicDistanceEstimator(root.base(), root.alpha(), std::move(randomness), buckets) {}

  const RationalSimilarity& params() const noexcept { return params_; }
  std::size_t repetitions() const noexcept { return randomness_.size(); }
  std::uint64_t bucket_count() const noexcept { return buckets_; }
  const std::shared_ptr<const SketchRandomness>& randomness(std::size_t rep) const {
    return randomness_.at(rep);
  }

  /// An empty sketch for repetition `rep`.
  Sketch make_sketch(std::size_t rep) const { return Sketch(randomness(rep), buckets_); }

  /// Sketch of the whole universe for repetition `rep`; present only when
  /// complements are needed (x < y).
  const Sketch* all_ones(std::size_t rep) const {
    return all_ones_.empty() ? nullptr : &all_ones_.at(rep);
  }

  /// Single-shot multiplicative estimate of 1 − S. Not clamped.
  double estimate_distance(const Sketch& a, const Sketch& b) const {
    if (!is_metric(params_)) {
      throw PreconditionError("distance estimate requires a metric similarity (z' >= max(x,y,z))");
    }
    return estimate_distance_unchecked(a, b);
  }

  /// Median over repetitions; a[rep] and b[rep] share randomness(rep).
  double estimate_distance(std::span<const Sketch> a, std::span<const Sketch> b) const {
    check_spans(a, b);
    return median_amplify([&](std::size_t rep) { return estimate_distance(a[rep], b[rep]); },
                          repetitions());
  }

  /// Same formula without the metric check. Sørensen–Dice, for example, has
  /// a non-negative decomposition but no guarantee.
  double estimate_distance_unchecked(const Sketch& a, const Sketch& b) const {
    const double sym = l0_estimate(merge(a, b, -1));
    if (sym == 0) return 0.0;
    const double d = static_cast<double>(a.universe_size());
    const auto& p = normalized_;
    double den = 0;
    if (p.x() >= p.y()) {
      den = p.y() * d + (p.x() - p.y()) * l0_estimate(merge(a, b, +1)) + (p.z_prime() - p.x()) * sym;
    } else {
      den = (p.y() - p.x()) * l0_estimate(complement_union(a, b)) + p.x() * d +
            (p.z_prime() - p.y()) * sym;
    }
    if (den <= 0) return 0.0;
    return (p.z_prime() - p.z()) * sym / den;
  }

  /// Single-shot estimate of (1 − S)^α. |A∩B| (or |~A∩~B|) is recovered
  /// from the exact cardinalities and an estimate of the union.
  double estimate_root_distance(const Sketch& a, const Sketch& b) const {
    if (!is_root_lshable(RootSimilarity(params_, alpha_))) {
      throw PreconditionError("root distance estimate requires an LSHable root similarity");
    }
    const double sym = l0_estimate(merge(a, b, -1));
    if (sym == 0) return 0.0;
    const double d = static_cast<double>(a.universe_size());
    const double sa = static_cast<double>(a.cardinality());
    const double sb = static_cast<double>(b.cardinality());
    const auto& p = normalized_;
    double den = 0;
    if (p.x() >= p.y()) {
      const double united = l0_estimate(merge(a, b, +1));
      den = p.y() * d + (p.x() - p.z_prime()) * (sa + sb - united) + (p.z_prime() - p.y()) * united;
    } else {
      const double united = l0_estimate(complement_union(a, b));
      den = p.x() * d + (p.y() - p.z_prime()) * ((d - sa) + (d - sb) - united) +
            (p.z_prime() - p.x()) * united;
    }
    if (den <= 0) return 0.0;
    return std::pow((p.z_prime() - p.z()) * sym / den, alpha_);
  }

  double estimate_root_distance(std::span<const Sketch> a, std::span<const Sketch> b) const {
    check_spans(a, b);
    return median_amplify([&](std::size_t rep) { return estimate_root_distance(a[rep], b[rep]); },
                          repetitions());
  }

  /// 1 − median distance, floored at 0. Additive error is at most ε whenever
  /// the distance is within a factor 1 ± ε, since distances are at most 1.
  double estimate_similarity_additive(std::span<const Sketch> a, std::span<const Sketch> b) const {
    check_spans(a, b);
    const double distance = median_amplify(
        [&](std::size_t rep) { return estimate_distance_unchecked(a[rep], b[rep]); }, repetitions());
    return std::max(0.0, 1.0 - distance);
  }

  double estimate_similarity_additive(const Sketch& a, const Sketch& b) const {
    return std::max(0.0, 1.0 - estimate_distance_unchecked(a, b));
  }

 private:
  BasicDistanceEstimator(RationalSimilarity params, std::optional<double> alpha,
                         std::vector<std::shared_ptr<const SketchRandomness>> randomness,
                         std::uint64_t buckets)
      : params_(params),
        normalized_(normalize(params)),
        alpha_(alpha.value_or(1.0)),
        randomness_(std::move(randomness)),
        buckets_(buckets) {
    if (randomness_.empty() || randomness_.size() % 2 == 0) {
      throw InputError("repetitions must be odd and positive");
    }
    if (buckets == 0) throw ConfigError("bucket count must be positive");
    for (const auto& r : randomness_) {
      if (!r || r->universe_size() != params.universe_size()) {
        throw ConfigError("randomness universe does not match the similarity's universe");
      }
    }
    if (params.x() < params.y()) {
      all_ones_.reserve(randomness_.size());
      for (const auto& r : randomness_) {
        Sketch full(r, buckets_);
        for (std::uint64_t i = 0; i < r->universe_size(); ++i) full.insert(static_cast<Item>(i));
        all_ones_.push_back(std::move(full));
      }
    }
  }

  // Divides by z' so that scaling the coefficients cannot change results
  // through rounding, as long as the scaled products are exact.
  static RationalSimilarity normalize(const RationalSimilarity& p) {
    if (p.z_prime() <= 0) return p;
    return {p.x() / p.z_prime(), p.y() / p.z_prime(), p.z() / p.z_prime(), 1.0, p.universe_size()};
  }

  const Sketch& all_ones_for(const Sketch& a) const {
    for (const auto& full : all_ones_) {
      if (full.compatible_with(a)) return full;
    }
    throw ConfigError("sketch randomness does not belong to this estimator");
  }

  // Sketch of ~a + ~b = 2·1 − a − b.
  Sketch complement_union(const Sketch& a, const Sketch& b) const {
    const Sketch& full = all_ones_for(a);
    Sketch out = merge(full, a, -1);
    out += full;
    out -= b;
    return out;
  }

  void check_spans(std::span<const Sketch> a, std::span<const Sketch> b) const {
    if (a.size() != repetitions() || b.size() != repetitions()) {
      throw ConfigError("expected one sketch per repetition");
    }
  }

  RationalSimilarity params_;
  RationalSimilarity normalized_;
  double alpha_;
  std::vector<std::shared_ptr<const SketchRandomness>> randomness_;
  std::uint64_t buckets_;
  std::vector<Sketch> all_ones_;
};

using DistanceEstimator = BasicDistanceEstimator<std::int64_t>;

/// `count` independent randomness instances derived from one master seed.
std::vector<std::shared_ptr<const SketchRandomness>> make_repetitions(std::uint64_t d,
                                                                      std::uint64_t master_seed,
                                                                      std::size_t count);

}  // namespace dynsim
