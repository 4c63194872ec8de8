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
#include <concepts>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "dynsim/errors.hpp"
#include "dynsim/hashing.hpp"
#include "dynsim/similarity.hpp"

namespace dynsim {

inline constexpr std::uint64_t kDefaultBuckets = 256;

/// Sizing inputs for a sketch. Only `buckets` and `d` shape the structure;
/// the accuracy knobs feed level selection and the theoretical bucket bound.
struct SketchConfig {
  std::uint64_t buckets = kDefaultBuckets;  // c²
  std::uint64_t d = 1;
  double epsilon = 0.5;
  double delta = 0.1;
  double r1 = 0.5;

  void validate() const;
};

/// Sampling parameter p = (ε/5)²·r1·δ.
double sampling_parameter(double epsilon, double delta, double r1);

/// Bucket count at which the sampled union is perfectly hashed with
/// probability 1 − δ: (1/√δ)·(1/(p·r1) + 1/(p·r1²))². Far above what is
/// needed in practice; reported for reference only.
double theoretical_bucket_count(const SketchConfig& cfg);

/// Probability that an item lands on `level` under the lsb scheme.
inline double level_probability(int level, int max_level) {
  return std::ldexp(1.0, level < max_level ? -(level + 1) : -max_level);
}

/// Per-item-set sketch: an exact signed cardinality plus a (levels × c²)
/// matrix of signed counters. Item i lands on row lsb(h(i)) and column
/// h_k(i) of that row. The sketch is linear in the characteristic vector,
/// so deletions are just negative updates and sketches add entrywise.
///
/// Not internally synchronized: one writer, or any number of readers.
template <std::signed_integral Counter>
class BasicLevelSketch {
 public:
  using Scalar = Counter;
  using Matrix = Eigen::Matrix<Counter, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BasicLevelSketch(std::shared_ptr<const SketchRandomness> randomness, std::uint64_t buckets)
      : randomness_(std::move(randomness)), buckets_(buckets) {
    if (!randomness_) throw ConfigError("sketch requires randomness");
    if (buckets == 0) throw ConfigError("bucket count must be positive");
    counters_ = Matrix::Zero(randomness_->levels(), static_cast<Eigen::Index>(buckets));
  }

  /// Applies the stream update (item, v) with v ∈ {+1, −1}.
  void update(Item item, int v) {
    if (v != 1 && v != -1) throw InputError("update value must be +1 or -1");
    if (item >= universe_size()) {
      throw InputError("item " + std::to_string(item) + " outside universe of size " +
                       std::to_string(universe_size()));
    }
    const int k = randomness_->level_of(item);
    const auto l = static_cast<Eigen::Index>(randomness_->bucket_of(k, item, buckets_));
    checked_add(counters_(k, l), static_cast<Counter>(v));
    checked_add(cardinality_, static_cast<Counter>(v));
  }

  void insert(Item item) { update(item, +1); }
  void erase(Item item) { update(item, -1); }

  Counter cardinality() const noexcept { return cardinality_; }
  const Matrix& counters() const noexcept { return counters_; }
  auto row(int level) const { return counters_.row(level); }

  std::uint64_t bucket_count() const noexcept { return buckets_; }
  int levels() const noexcept { return static_cast<int>(counters_.rows()); }
  int max_level() const noexcept { return levels() - 1; }
  std::uint64_t universe_size() const noexcept { return randomness_->universe_size(); }
  const SketchRandomness& randomness() const noexcept { return *randomness_; }
  const std::shared_ptr<const SketchRandomness>& shared_randomness() const noexcept {
    return randomness_;
  }

  bool compatible_with(const BasicLevelSketch& other) const noexcept {
    return buckets_ == other.buckets_ && *randomness_ == *other.randomness_;
  }

  /// Entrywise this + sign·other, cardinality included.
  BasicLevelSketch& accumulate(const BasicLevelSketch& other, int sign) {
    if (!compatible_with(other)) {
      throw ConfigError("cannot merge sketches with different randomness or bucket counts");
    }
    if (sign != 1 && sign != -1) throw InputError("merge sign must be +1 or -1");
    Counter* out = counters_.data();
    const Counter* in = other.counters_.data();
    for (Eigen::Index i = 0; i < counters_.size(); ++i) {
      checked_add(out[i], sign > 0 ? in[i] : checked_negate(in[i]));
    }
    checked_add(cardinality_, sign > 0 ? other.cardinality_ : checked_negate(other.cardinality_));
    return *this;
  }

  BasicLevelSketch& operator+=(const BasicLevelSketch& other) { return accumulate(other, +1); }
  BasicLevelSketch& operator-=(const BasicLevelSketch& other) { return accumulate(other, -1); }

  /// Rebuilds a sketch from stored state; used by deserialization.
  static BasicLevelSketch from_parts(std::shared_ptr<const SketchRandomness> randomness,
                                     Counter cardinality, Matrix counters) {
    BasicLevelSketch sketch(std::move(randomness), static_cast<std::uint64_t>(counters.cols()));
    if (counters.rows() != sketch.counters_.rows()) {
      throw ConfigError("stored level count does not match the randomness");
    }
    sketch.cardinality_ = cardinality;
    sketch.counters_ = std::move(counters);
    return sketch;
  }

  friend bool operator==(const BasicLevelSketch& lhs, const BasicLevelSketch& rhs) {
    return lhs.compatible_with(rhs) && lhs.cardinality_ == rhs.cardinality_ &&
           lhs.counters_ == rhs.counters_;
  }

 private:
  static void checked_add(Counter& target, Counter delta) {
    if (__builtin_add_overflow(target, delta, &target)) {
      throw CounterOverflow("sketch counter overflow");
    }
  }

  static Counter checked_negate(Counter value) {
    if (value == std::numeric_limits<Counter>::min()) {
      throw CounterOverflow("sketch counter overflow");
    }
    return static_cast<Counter>(-value);
  }

  std::shared_ptr<const SketchRandomness> randomness_;
  std::uint64_t buckets_;
  Counter cardinality_ = 0;
  Matrix counters_;
};

using LevelSketch = BasicLevelSketch<std::int64_t>;

/// a + sign·b.
template <typename Counter>
BasicLevelSketch<Counter> merge(const BasicLevelSketch<Counter>& a, const BasicLevelSketch<Counter>& b,
                                int sign) {
  BasicLevelSketch<Counter> out = a;
  out.accumulate(b, sign);
  return out;
}

template <typename Derived>
std::uint64_t nonzero_count(const Eigen::DenseBase<Derived>& row) {
  return static_cast<std::uint64_t>((row.derived().array() != 0).count());
}

/// Rational similarity of two sketches restricted to one level. Buckets
/// stand in for items: a bucket is "in" a set when its counter is nonzero,
/// and the universe is replaced by the expected number of items sampled
/// into the level, d·Pr[level].
template <typename Counter>
double similarity_at_level(const BasicLevelSketch<Counter>& a, const BasicLevelSketch<Counter>& b,
                           int level, const RationalSimilarity& params) {
  if (!a.compatible_with(b)) {
    throw ConfigError("cannot compare sketches with different randomness or bucket counts");
  }
  if (level < 0 || level > a.max_level()) throw InputError("level outside sketch range");
  const auto in_a = (a.row(level).array() != 0);
  const auto in_b = (b.row(level).array() != 0);
  const auto both = static_cast<double>((in_a && in_b).count());
  const auto either = static_cast<double>((in_a || in_b).count());
  const double universe =
      static_cast<double>(a.universe_size()) * level_probability(level, a.max_level());
  const Overlap cells{both, std::max(0.0, universe - either), either - both};
  return rational_similarity(params, cells);
}

/// Level prescribed for the named similarities (ε² form), before clamping
/// to [0, max_level]. `size_hint` is |A| for Jaccard and Anderberg, d for
/// Hamming and Rogers–Tanimoto. Any other parameters fall back to
/// general_sample_level with `size_hint` read as N(A,B).
int sample_level(const RationalSimilarity& params, double epsilon, double delta, double r,
                 double size_hint, int max_level);

/// The conservative bound k ≤ log2((ε/5)²·δ·r·N / max{x+y, z'+y, z+y}).
int general_sample_level(const RationalSimilarity& params, double epsilon, double delta, double r,
                         double numerator_value, int max_level);

/// Sketch row whose inclusion probability matches the sampling rate 2^-k.
/// Rows are populated with probability 2^-(row+1), hence the shift by one.
constexpr int sketch_row_for(int k, int max_level) noexcept {
  return std::clamp(k - 1, 0, max_level);
}

/// Occupancy inversion: expected number of balls that leave `nonzero` of
/// `buckets` bins occupied.
double occupancy_correction(std::uint64_t nonzero, std::uint64_t buckets);

/// Distinct-count (ℓ0) estimate of the sketched vector. Picks the shallowest
/// level k* from which every deeper row is at most half full, corrects each
/// of those rows for bucket collisions and scales their sum by
/// 1/Pr[level ≥ k*] = 2^k*. Signs are ignored, so difference sketches work.
template <typename Counter>
double l0_estimate(const BasicLevelSketch<Counter>& sketch) {
  const int top = sketch.max_level();
  const std::uint64_t half = sketch.bucket_count() / 2;
  int start = top;
  for (int k = top; k >= 0; --k) {
    if (nonzero_count(sketch.row(k)) > half) break;
    start = k;
  }
  double total = 0;
  for (int k = start; k <= top; ++k) {
    total += occupancy_correction(nonzero_count(sketch.row(k)), sketch.bucket_count());
  }
  return std::ldexp(total, start);
}

}  // namespace dynsim
