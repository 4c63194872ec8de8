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

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynsim/errors.hpp"
#include "dynsim/hashing.hpp"
#include "dynsim/l0_distance.hpp"
#include "dynsim/level_sketch.hpp"
#include "dynsim/similarity.hpp"

namespace dynsim {

using SetId = std::uint64_t;

inline constexpr std::size_t kDefaultMaxPairsPerBucket = 10'000;

struct LshConfig {
  double r1 = 0.5;  // similarities at or above are "high"
  double r2 = 0.1;  // similarities at or below are "low"
  double epsilon = 0.5;
  double delta = 0.1;
  double p = 0.0005;             // sampling parameter, (ε/5)²·r1·δ unless overridden
  std::size_t bands = 1;         // r: signatures AND-ed into one key
  std::size_t repetitions = 1;   // l: independent tables OR-ed together
  std::optional<double> verify_threshold;
  std::size_t max_pairs_per_bucket = kDefaultMaxPairsPerBucket;
  // Index every non-empty set at this one grid level instead of its
  // cardinality window. Used when sampling at a fixed inclusion rate.
  std::optional<int> fixed_level;

  /// p derived from (ε, δ, r1).
  static LshConfig from_accuracy(double r1, double r2, double epsilon, double delta,
                                 std::size_t bands = 1, std::size_t repetitions = 1);

  void validate() const;

  /// r2 / (δ·(1 − (ε/5)·√r1)), the collision bound for low pairs. May exceed 1.
  double low_collision_bound() const;
  /// (1 − ε)·r1, the collision bound for high pairs.
  double high_collision_bound() const { return (1 - epsilon) * r1; }
};

/// I = {⌊m·log2(1/r1)⌋ : m ≥ 0} ∩ [0, ⌈log2 d⌉] with step at least 1; the
/// deepest level is always included.
std::vector<int> level_grid(double r1, std::uint64_t d);

/// Grid levels inside [⌊log2(r1²·p·s)⌋, ⌊log2(p·s)⌋], with a window that falls
/// below zero clamped up to level 0. Empty for s ≤ 0; {fixed_level} when set.
std::vector<int> candidate_levels(std::int64_t s, const LshConfig& cfg, std::span<const int> grid);

struct CandidatePair {
  SetId id_a = 0;  // id_a < id_b
  SetId id_b = 0;
  int row = 0;  // sketch row whose signatures collided
  std::size_t repetition = 0;
  std::optional<double> verified_distance;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

struct CandidateResult {
  std::vector<CandidatePair> pairs;  // sorted by (id_a, id_b), one entry per pair
  std::size_t truncated_buckets = 0;  // buckets whose pair expansion hit the cap
};

/// Hash tables keyed by (sketch row, repetition) and then by a banded signature.
class BandedTables {
 public:
  using Key = std::vector<std::uint64_t>;

  void add(int row, std::size_t repetition, Key key, SetId id);
  void remove(SetId id);
  bool contains(SetId id) const { return entries_.contains(id); }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Rows under which `id` is stored, ascending, without duplicates.
  std::vector<int> rows_of(SetId id) const;

  CandidateResult candidates(std::size_t max_pairs_per_bucket) const;

 private:
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept;
  };
  using Table = std::unordered_map<Key, std::vector<SetId>, KeyHash>;
  struct Entry {
    int row;
    std::size_t repetition;
    Key key;
  };

  std::map<std::pair<int, std::size_t>, Table> tables_;
  std::unordered_map<SetId, std::vector<Entry>> entries_;
};

/// Candidate filter over level sketches. Each set is indexed at the sketch
/// rows backing the grid levels admissible for its exact cardinality; per
/// row and repetition its key is the concatenation of `bands` min-hash
/// signatures of that row. Rows with an empty signature are skipped.
class LshIndex {
 public:
  LshIndex(LshConfig cfg, std::shared_ptr<const SketchRandomness> randomness);

  const LshConfig& config() const noexcept { return cfg_; }
  std::span<const int> grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return tables_.size(); }
  std::vector<int> stored_rows(SetId id) const { return tables_.rows_of(id); }

  /// Re-inserting an id replaces its previous entries.
  template <typename Counter>
  void insert(SetId id, const BasicLevelSketch<Counter>& sketch) {
    if (!(sketch.randomness() == *randomness_)) {
      throw ConfigError("sketch randomness does not match the index");
    }
    tables_.remove(id);
    for (int row : candidate_rows(sketch.cardinality(), sketch.max_level())) {
      const auto positions = nonzero_positions(sketch.row(row));
      if (positions.empty()) continue;
      for (std::size_t rep = 0; rep < cfg_.repetitions; ++rep) {
        BandedTables::Key key;
        key.reserve(cfg_.bands);
        for (std::size_t band = 0; band < cfg_.bands; ++band) {
          key.push_back(minhash_signature(std::span<const std::uint64_t>(positions),
                                          randomness_->minhash_seed(slot(rep, band), row)));
        }
        tables_.add(row, rep, std::move(key), id);
      }
    }
  }

  /// Sketch rows backing the admissible levels for a set of size `s`.
  /// Adjacent levels can share a row; each row is indexed once.
  std::vector<int> candidate_rows(std::int64_t s, int max_level) const;

  CandidateResult candidates() const { return tables_.candidates(cfg_.max_pairs_per_bucket); }

 private:
  std::uint64_t slot(std::size_t rep, std::size_t band) const noexcept {
    return static_cast<std::uint64_t>(rep * cfg_.bands + band);
  }

  LshConfig cfg_;
  std::shared_ptr<const SketchRandomness> randomness_;
  std::vector<int> grid_;
  BandedTables tables_;
};

/// Classical banded min-hash on explicit item sets, without sketching or
/// levels. Reference for the amplification curve 1 − (1 − s^r)^l.
class MinHashBaseline {
 public:
  MinHashBaseline(std::size_t bands, std::size_t repetitions, std::uint64_t seed,
                  std::size_t max_pairs_per_bucket = kDefaultMaxPairsPerBucket);

  void insert(SetId id, const ItemSet& items);
  CandidateResult candidates() const { return tables_.candidates(max_pairs_per_bucket_); }

 private:
  std::size_t bands_;
  std::size_t repetitions_;
  std::uint64_t seed_;
  std::size_t max_pairs_per_bucket_;
  BandedTables tables_;
};

/// Probability that a pair of similarity s becomes a candidate under
/// (bands, repetitions) banding: 1 − (1 − s^r)^l.
double amplified_probability(double s, std::size_t bands, std::size_t repetitions);

/// Keeps pairs whose estimated distance is at most `threshold` and records
/// the estimate. `sketches_of(id)` yields one sketch per estimator repetition.
template <typename Counter, typename Lookup>
std::vector<CandidatePair> verify(std::span<const CandidatePair> pairs,
                                  const BasicDistanceEstimator<Counter>& estimator,
                                  Lookup&& sketches_of, double threshold) {
  std::vector<CandidatePair> kept;
  for (const auto& pair : pairs) {
    const double distance = estimator.estimate_distance(sketches_of(pair.id_a), sketches_of(pair.id_b));
    if (distance <= threshold) {
      CandidatePair out = pair;
      out.verified_distance = distance;
      kept.push_back(out);
    }
  }
  return kept;
}

template <typename Counter>
struct LabeledSketchPair {
  BasicLevelSketch<Counter> a;
  BasicLevelSketch<Counter> b;
  double similarity;  // exact
};

struct SensitivityReport {
  double p_high = 0;  // collision rate among pairs with S ≥ r1
  double p_low = 0;   // collision rate among pairs with S ≤ r2
  std::size_t high_pairs = 0;
  std::size_t low_pairs = 0;
};

/// Collision frequencies of the single-table, single-band filter (r = l = 1)
/// over pairs with known similarity. Each pair is indexed on its own, with
/// the randomness its sketches carry.
template <typename Counter>
SensitivityReport sensitivity_report(std::span<const LabeledSketchPair<Counter>> pairs,
                                     LshConfig cfg) {
  cfg.bands = 1;
  cfg.repetitions = 1;
  SensitivityReport report;
  std::size_t high_hits = 0;
  std::size_t low_hits = 0;
  for (const auto& pair : pairs) {
    const bool high = pair.similarity >= cfg.r1;
    const bool low = pair.similarity <= cfg.r2;
    if (!high && !low) continue;
    LshIndex index(cfg, pair.a.shared_randomness());
    index.insert(0, pair.a);
    index.insert(1, pair.b);
    const bool hit = !index.candidates().pairs.empty();
    if (high) {
      ++report.high_pairs;
      high_hits += hit;
    } else {
      ++report.low_pairs;
      low_hits += hit;
    }
  }
  if (report.high_pairs) report.p_high = static_cast<double>(high_hits) / report.high_pairs;
  if (report.low_pairs) report.p_low = static_cast<double>(low_hits) / report.low_pairs;
  return report;
}

/// CSV with header `id_a,id_b,row,repetition,verified_distance`; the last
/// column is empty for unverified pairs.
void write_candidates_csv(std::ostream& out, std::span<const CandidatePair> pairs);

}  // namespace dynsim
