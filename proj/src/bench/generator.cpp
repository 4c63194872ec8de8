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

#include "dynsim/bench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "dynsim/errors.hpp"

namespace dynsim::bench {

namespace {

using Rng = std::mt19937_64;

// Floyd's algorithm: `count` distinct values from [0, range).
std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t range, std::uint64_t count) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::uint64_t j = range - count; j < range; ++j) {
    const auto t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    const auto pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    out.push_back(pick);
  }
  return out;
}

std::vector<Item> random_row(Rng& rng, const GeneratorConfig& cfg) {
  const double density = std::uniform_real_distribution<double>(cfg.density_lo, cfg.density_hi)(rng);
  const auto size = std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::llround(density * static_cast<double>(cfg.columns))), 1,
      cfg.columns);
  std::vector<Item> row;
  for (auto v : sample_distinct(rng, cfg.columns, size)) row.push_back(static_cast<Item>(v));
  return row;
}

double flipped_similarity(std::uint64_t size, std::uint64_t flips) {
  return static_cast<double>(size - flips) / static_cast<double>(size + flips);
}

// Removes `flips` members of `source` and adds as many non-members.
std::vector<Item> plant_partner(Rng& rng, const ItemSet& source, const SimilarityRange& range,
                                std::uint64_t d) {
  const std::uint64_t size = source.size();
  const double target = std::uniform_real_distribution<double>(range.lo, range.hi)(rng);
  const double exact_flips = static_cast<double>(size) * (1 - target) / (1 + target);
  const auto nearest = static_cast<std::int64_t>(std::llround(exact_flips));
  std::int64_t flips = -1;
  for (std::int64_t candidate : {nearest, nearest - 1, nearest + 1}) {
    if (candidate < 0 || static_cast<std::uint64_t>(candidate) > size ||
        static_cast<std::uint64_t>(candidate) > d - size) {
      continue;
    }
    const double s = flipped_similarity(size, static_cast<std::uint64_t>(candidate));
    if (s >= range.lo && s <= range.hi) {
      flips = candidate;
      break;
    }
  }
  if (flips < 0) {
    std::ostringstream msg;
    msg << "cannot plant a similarity in (" << range.lo << ", " << range.hi << ") for a row of "
        << size << " items";
    throw InputError(msg.str());
  }
  const auto members = source.members();
  std::vector<Item> partner(members.begin(), members.end());
  const auto dropped = sample_distinct(rng, size, static_cast<std::uint64_t>(flips));
  std::vector<bool> drop(size, false);
  for (auto idx : dropped) drop[idx] = true;
  std::vector<Item> kept;
  for (std::uint64_t i = 0; i < size; ++i) {
    if (!drop[i]) kept.push_back(partner[i]);
  }
  std::unordered_set<Item> taken(members.begin(), members.end());
  std::uniform_int_distribution<std::uint64_t> any(0, d - 1);
  for (std::int64_t added = 0; added < flips;) {
    const auto item = static_cast<Item>(any(rng));
    if (taken.insert(item).second) {
      kept.push_back(item);
      ++added;
    }
  }
  return kept;
}

void validate(const GeneratorConfig& cfg) {
  if (cfg.rows == 0 || cfg.columns == 0) throw InputError("rows and columns must be positive");
  if (cfg.columns > (std::uint64_t{1} << 32)) throw InputError("columns must not exceed 2^32");
  if (!(cfg.density_lo > 0 && cfg.density_lo <= cfg.density_hi && cfg.density_hi <= 1)) {
    throw InputError("density range must satisfy 0 < lo <= hi <= 1");
  }
  if (cfg.plant_every == 0) throw InputError("plant interval must be positive");
  for (const auto& r : cfg.planted) {
    if (!(r.lo > 0 && r.lo < r.hi && r.hi < 1)) throw InputError("planted ranges must lie in (0, 1)");
    if (!(r.weight >= 0)) throw InputError("planted weights must be non-negative");
  }
  if (!(cfg.churn_fraction >= 0)) throw InputError("churn fraction must be non-negative");
}

}  // namespace

std::vector<SimilarityRange> default_planted_ranges() {
  return {{0.35, 0.45, 1}, {0.45, 0.55, 1}, {0.55, 0.65, 1},
          {0.65, 0.75, 1}, {0.75, 0.85, 1}, {0.85, 0.95, 1}};
}

std::vector<SimilarityRange> distribution_ranges() {
  // Pair counts per 0.05-wide bin, starting at 0.1.
  static constexpr double kCounts[] = {995,    33864,  364496, 206572, 233303, 576286, 861799,
                                       593181, 549257, 144769, 33093,  27777,  42181,  23185};
  std::vector<SimilarityRange> ranges;
  double lo = 0.10;
  for (double count : kCounts) {
    ranges.push_back({lo, lo + 0.05, count});
    lo += 0.05;
  }
  return ranges;
}

FlipRates flip_rates(double target, std::uint64_t size, std::uint64_t d) {
  if (!(target > 0 && target <= 1)) throw InputError("target similarity must lie in (0, 1]");
  if (size == 0 || size >= d) throw InputError("row size must lie in (0, d)");
  const double remove = (1 - target) / (1 + target);
  return {remove, remove * static_cast<double>(size) / static_cast<double>(d - size)};
}

GeneratedCorpus generate(const GeneratorConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  std::vector<ItemSet> rows;
  std::vector<SetId> base_ids;
  struct Planted {
    SetId source, partner;
    SimilarityRange range;
  };
  std::vector<Planted> planted;
  std::vector<double> weights;
  for (const auto& r : cfg.planted) weights.push_back(r.weight);
  std::discrete_distribution<std::size_t> pick_range(weights.begin(), weights.end());

  std::size_t next_range = 0;
  for (std::uint64_t j = 0; j < cfg.rows; ++j) {
    base_ids.push_back(rows.size());
    rows.emplace_back(random_row(rng, cfg));
    if (cfg.planted.empty() || (j + 1) % cfg.plant_every != 0) continue;
    const auto& range = cfg.weighted_draw ? cfg.planted[pick_range(rng)]
                                          : cfg.planted[next_range++ % cfg.planted.size()];
    const SetId source = rows.size() - 1;
    rows.emplace_back(plant_partner(rng, rows.back(), range, cfg.columns));
    planted.push_back({source, rows.size() - 1, range});
  }

  GeneratedCorpus out;
  const auto jaccard = RationalSimilarity::jaccard(cfg.columns);
  for (const auto& p : planted) {
    out.manifest.push_back({p.source, p.partner, p.range.lo, p.range.hi,
                            exact_similarity(jaccard, rows[p.source], rows[p.partner]), true});
  }
  // One unplanted pair per planted pair: the source against a random other base row.
  if (base_ids.size() > 1) {
    std::uniform_int_distribution<std::size_t> any(0, base_ids.size() - 2);
    for (const auto& p : planted) {
      std::size_t idx = any(rng);
      if (base_ids[idx] >= p.source) ++idx;
      const auto [a, b] = std::minmax(p.source, base_ids[idx]);
      out.manifest.push_back({a, b, 0, 0, exact_similarity(jaccard, rows[a], rows[b]), false});
    }
  }

  auto& stream = out.stream;
  stream.sets = rows.size();
  stream.universe = cfg.columns;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (Item item : rows[j].members()) stream.updates.push_back({static_cast<std::uint32_t>(j), item, 1});
  }
  if (cfg.churn) {
    std::uniform_int_distribution<std::uint64_t> any(0, cfg.columns - 1);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto extra = std::min<std::uint64_t>(
          static_cast<std::uint64_t>(std::llround(cfg.churn_fraction * static_cast<double>(rows[j].size()))),
          cfg.columns - rows[j].size());
      std::unordered_set<Item> used;
      while (used.size() < extra) {
        const auto item = static_cast<Item>(any(rng));
        if (rows[j].contains(item) || !used.insert(item).second) continue;
        stream.updates.push_back({static_cast<std::uint32_t>(j), item, 1});
        stream.updates.push_back({static_cast<std::uint32_t>(j), item, -1});
      }
    }
    std::shuffle(stream.updates.begin(), stream.updates.end(), rng);
    // Within each cancelling pair the insertion comes first.
    std::unordered_set<std::uint64_t> seen;
    for (auto& u : stream.updates) {
      const auto key = (static_cast<std::uint64_t>(u.set) << 32) | u.item;
      if (rows[u.set].contains(u.item)) continue;
      u.value = seen.insert(key).second ? 1 : -1;
    }
  }
  return out;
}

void write_manifest(std::ostream& out, const std::vector<ManifestEntry>& manifest) {
  out << "id_a,id_b,target_lo,target_hi,similarity,planted\n";
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : manifest) {
    out << e.a << ',' << e.b << ',' << e.target_lo << ',' << e.target_hi << ',' << e.similarity
        << ',' << (e.planted ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

std::vector<ManifestEntry> read_manifest(std::istream& in) {
  std::vector<ManifestEntry> manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#' || line.rfind("id_a", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    ManifestEntry e;
    int planted = 0;
    if (!(fields >> e.a >> e.b >> e.target_lo >> e.target_hi >> e.similarity >> planted)) {
      throw ParseError(line_no, "malformed manifest row");
    }
    e.planted = planted != 0;
    manifest.push_back(e);
  }
  return manifest;
}

}  // namespace dynsim::bench
