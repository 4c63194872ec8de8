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

#include "dynsim/lsh_index.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <tuple>

namespace dynsim {

namespace {

constexpr std::uint64_t kBaselineStream = 4;

}  // namespace

LshConfig LshConfig::from_accuracy(double r1, double r2, double epsilon, double delta,
                                   std::size_t bands, std::size_t repetitions) {
  LshConfig cfg;
  cfg.r1 = r1;
  cfg.r2 = r2;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.p = sampling_parameter(epsilon, delta, r1);
  cfg.bands = bands;
  cfg.repetitions = repetitions;
  cfg.validate();
  return cfg;
}

void LshConfig::validate() const {
  if (!(r2 > 0 && r2 < r1 && r1 < 1)) throw InputError("thresholds must satisfy 0 < r2 < r1 < 1");
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
    throw InputError("epsilon and delta must lie in (0, 1)");
  }
  if (!(p > 0 && p < 1)) throw InputError("sampling parameter p must lie in (0, 1)");
  if (bands == 0 || repetitions == 0) throw InputError("bands and repetitions must be positive");
  if (fixed_level && *fixed_level < 0) throw InputError("fixed level must be non-negative");
  if (verify_threshold && !(*verify_threshold >= 0)) {
    throw InputError("verification threshold must be non-negative");
  }
}

double LshConfig::low_collision_bound() const {
  return r2 / (delta * (1 - (epsilon / 5) * std::sqrt(r1)));
}

std::vector<int> level_grid(double r1, std::uint64_t d) {
  if (!(r1 > 0 && r1 < 1)) throw InputError("r1 must lie in (0, 1)");
  const int top = ceil_log2(d);
  const double step = std::max(1.0, std::log2(1 / r1));
  std::vector<int> grid;
  for (int m = 0;; ++m) {
    const auto level = static_cast<int>(std::floor(m * step + 1e-9));
    if (level > top) break;
    if (grid.empty() || grid.back() != level) grid.push_back(level);
  }
  if (grid.back() != top) grid.push_back(top);
  return grid;
}

std::vector<int> candidate_levels(std::int64_t s, const LshConfig& cfg, std::span<const int> grid) {
  if (s <= 0) return {};
  if (cfg.fixed_level) return {*cfg.fixed_level};
  const double mass = cfg.p * static_cast<double>(s);
  const int hi = std::max(0, static_cast<int>(std::floor(std::log2(mass))));
  const int lo = std::max(0, static_cast<int>(std::floor(std::log2(cfg.r1 * cfg.r1 * mass))));
  std::vector<int> levels;
  for (int k : grid) {
    if (k >= lo && k <= hi) levels.push_back(k);
  }
  return levels;
}

std::size_t BandedTables::KeyHash::operator()(const Key& key) const noexcept {
  std::uint64_t h = key.size();
  for (auto v : key) h = splitmix64(h ^ v);
  return static_cast<std::size_t>(h);
}

void BandedTables::add(int row, std::size_t repetition, Key key, SetId id) {
  tables_[{row, repetition}][key].push_back(id);
  entries_[id].push_back({row, repetition, std::move(key)});
}

void BandedTables::remove(SetId id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) return;
  for (const auto& entry : it->second) {
    auto table = tables_.find({entry.row, entry.repetition});
    if (table == tables_.end()) continue;
    auto bucket = table->second.find(entry.key);
    if (bucket == table->second.end()) continue;
    auto& ids = bucket->second;
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
    if (ids.empty()) table->second.erase(bucket);
  }
  entries_.erase(it);
}

std::vector<int> BandedTables::rows_of(SetId id) const {
  std::vector<int> rows;
  if (auto it = entries_.find(id); it != entries_.end()) {
    for (const auto& entry : it->second) rows.push_back(entry.row);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

CandidateResult BandedTables::candidates(std::size_t max_pairs_per_bucket) const {
  CandidateResult result;
  for (const auto& [slot, table] : tables_) {
    for (const auto& [key, ids] : table) {
      std::size_t emitted = 0;
      for (std::size_t i = 0; i < ids.size() && emitted < max_pairs_per_bucket; ++i) {
        for (std::size_t j = i + 1; j < ids.size() && emitted < max_pairs_per_bucket; ++j) {
          const auto [lo, hi] = std::minmax(ids[i], ids[j]);
          result.pairs.push_back({lo, hi, slot.first, slot.second, std::nullopt});
          ++emitted;
        }
      }
      if (ids.size() * (ids.size() - 1) / 2 > emitted) ++result.truncated_buckets;
    }
  }
  auto& pairs = result.pairs;
  std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& l, const CandidatePair& r) {
    return std::tie(l.id_a, l.id_b, l.row, l.repetition) <
           std::tie(r.id_a, r.id_b, r.row, r.repetition);
  });
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const CandidatePair& l, const CandidatePair& r) {
                            return l.id_a == r.id_a && l.id_b == r.id_b;
                          }),
              pairs.end());
  return result;
}

LshIndex::LshIndex(LshConfig cfg, std::shared_ptr<const SketchRandomness> randomness)
    : cfg_(cfg), randomness_(std::move(randomness)) {
  cfg_.validate();
  if (!randomness_) throw ConfigError("index requires randomness");
  grid_ = level_grid(cfg_.r1, randomness_->universe_size());
}

std::vector<int> LshIndex::candidate_rows(std::int64_t s, int max_level) const {
  std::vector<int> rows;
  for (int level : candidate_levels(s, cfg_, grid_)) rows.push_back(sketch_row_for(level, max_level));
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

MinHashBaseline::MinHashBaseline(std::size_t bands, std::size_t repetitions, std::uint64_t seed,
                                 std::size_t max_pairs_per_bucket)
    : bands_(bands),
      repetitions_(repetitions),
      seed_(seed),
      max_pairs_per_bucket_(max_pairs_per_bucket) {
  if (bands == 0 || repetitions == 0) throw InputError("bands and repetitions must be positive");
}

void MinHashBaseline::insert(SetId id, const ItemSet& items) {
  tables_.remove(id);
  if (items.empty()) return;
  for (std::size_t rep = 0; rep < repetitions_; ++rep) {
    BandedTables::Key key;
    key.reserve(bands_);
    for (std::size_t band = 0; band < bands_; ++band) {
      const auto spec = derive_hash_spec(seed_, kBaselineStream, rep * bands_ + band, kWordBits);
      key.push_back(minhash_signature(items.members(), spec));
    }
    tables_.add(0, rep, std::move(key), id);
  }
}

double amplified_probability(double s, std::size_t bands, std::size_t repetitions) {
  return 1 - std::pow(1 - std::pow(s, static_cast<double>(bands)), static_cast<double>(repetitions));
}

void write_candidates_csv(std::ostream& out, std::span<const CandidatePair> pairs) {
  out << "id_a,id_b,row,repetition,verified_distance\n";
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& pair : pairs) {
    out << pair.id_a << ',' << pair.id_b << ',' << pair.row << ',' << pair.repetition << ',';
    if (pair.verified_distance) out << *pair.verified_distance;
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace dynsim
