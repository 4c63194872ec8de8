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

#include "dynsim/bench/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <utility>

#include "dynsim/errors.hpp"
#include "dynsim/hashing.hpp"

namespace dynsim::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw InputError("sampling rate alpha must lie in (0, 1]");
}

std::shared_ptr<const SketchRandomness> trial_randomness(std::uint64_t d, std::uint64_t seed,
                                                         std::uint64_t trial) {
  return std::make_shared<const SketchRandomness>(d, splitmix64(seed ^ splitmix64(trial + 1)));
}

// Sketches for the listed sets only.
std::unordered_map<SetId, LevelSketch> sketch_subset(const StreamFile& stream,
                                                     const std::set<SetId>& ids,
                                                     const std::shared_ptr<const SketchRandomness>& randomness,
                                                     std::uint64_t buckets) {
  std::unordered_map<SetId, LevelSketch> out;
  for (SetId id : ids) out.emplace(id, LevelSketch(randomness, buckets));
  for (const auto& u : stream.updates) {
    if (auto it = out.find(u.set); it != out.end()) it->second.update(u.item, u.value);
  }
  return out;
}

void check_manifest(const StreamFile& stream, const std::vector<ManifestEntry>& manifest) {
  for (const auto& e : manifest) {
    if (e.a >= stream.sets || e.b >= stream.sets) {
      throw DataError("manifest references a set outside the stream");
    }
  }
}

}  // namespace

AlphaMapping parse_alpha_mapping(const std::string& name) {
  if (name == "inclusion") return AlphaMapping::kInclusion;
  if (name == "cardinality") return AlphaMapping::kCardinality;
  throw InputError("unknown alpha mapping '" + name + "'");
}

std::string to_string(AlphaMapping mapping) {
  return mapping == AlphaMapping::kInclusion ? "inclusion" : "cardinality";
}

int inclusion_row(double alpha, int max_level) {
  check_alpha(alpha);
  return std::clamp(static_cast<int>(std::ceil(std::log2(1 / alpha))) - 1, 0, max_level);
}

int cardinality_row(double alpha, std::int64_t cardinality, int max_level) {
  check_alpha(alpha);
  const double mass = alpha * static_cast<double>(cardinality);
  const int k = mass >= 1 ? static_cast<int>(std::floor(std::log2(mass))) : 0;
  return sketch_row_for(k, max_level);
}

int comparison_row(AlphaMapping mapping, double alpha, std::int64_t sa, std::int64_t sb,
                   int max_level) {
  return mapping == AlphaMapping::kInclusion ? inclusion_row(alpha, max_level)
                                             : cardinality_row(alpha, std::min(sa, sb), max_level);
}

std::vector<BucketRate> recommended_bucket_rates() {
  return {{128, 0.05}, {256, 0.025}, {512, 0.01}, {1024, 0.005}};
}

std::vector<DeviationRow> deviation_report(const StreamFile& stream,
                                           const std::vector<ManifestEntry>& manifest,
                                           const DeviationOptions& options) {
  if (options.repetitions == 0) throw InputError("repetitions must be positive");
  check_manifest(stream, manifest);
  const auto sets = net_sets(stream);
  const auto jaccard = RationalSimilarity::jaccard(stream.universe);
  std::vector<DeviationRow> rows;
  for (const auto& cell : options.grid) {
    check_alpha(cell.alpha);
    DeviationRow row;
    row.buckets = cell.buckets;
    row.alpha = cell.alpha;
    double high_sum = 0;
    double low_sum = 0;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
      auto start = Clock::now();
      const auto corpus = ingest(stream, sets, trial_randomness(stream.universe, options.seed, rep),
                                 cell.buckets);
      row.build_seconds += seconds_since(start);
      start = Clock::now();
      for (const auto& e : manifest) {
        const auto& a = corpus.sketches[e.a];
        const auto& b = corpus.sketches[e.b];
        const int level =
            comparison_row(options.mapping, cell.alpha, a.cardinality(), b.cardinality(), a.max_level());
        const double deviation = std::abs(similarity_at_level(a, b, level, jaccard) - e.similarity);
        (e.similarity >= options.split ? high_sum : low_sum) += deviation;
      }
      row.query_seconds += seconds_since(start);
    }
    for (const auto& e : manifest) ++(e.similarity >= options.split ? row.high_pairs : row.low_pairs);
    const auto reps = static_cast<double>(options.repetitions);
    if (row.high_pairs) row.mean_high = high_sum / (reps * static_cast<double>(row.high_pairs));
    if (row.low_pairs) row.mean_low = low_sum / (reps * static_cast<double>(row.low_pairs));
    if (!manifest.empty()) {
      row.mean_total = (high_sum + low_sum) / (reps * static_cast<double>(manifest.size()));
    }
    row.build_seconds /= reps;
    row.query_seconds /= reps;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScurveRow> scurve_report(const StreamFile& stream,
                                     const std::vector<ManifestEntry>& manifest,
                                     const ScurveOptions& options) {
  if (options.trials == 0) throw InputError("trials must be positive");
  if (!(options.bin_width > 0 && options.bin_width <= 1)) throw InputError("bin width must lie in (0, 1]");
  check_manifest(stream, manifest);
  std::set<SetId> ids;
  for (const auto& e : manifest) ids.insert(e.a), ids.insert(e.b);
  const auto bins = static_cast<std::size_t>(std::ceil(1 / options.bin_width - 1e-9));
  auto bin_of = [&](double s) {
    return std::min(bins - 1, static_cast<std::size_t>(std::floor(s / options.bin_width + 1e-9)));
  };

  std::vector<ScurveRow> rows;
  for (const auto& point : options.grid) {
    check_alpha(point.alpha);
    LshConfig cfg;
    cfg.r1 = options.r1;
    cfg.r2 = options.r1 / 2;
    cfg.bands = point.bands;
    cfg.repetitions = point.repetitions;
    if (options.mapping == AlphaMapping::kCardinality) {
      cfg.p = std::min(point.alpha, 0.999);
    } else {
      cfg.fixed_level = static_cast<int>(std::ceil(std::log2(1 / point.alpha)));
    }
    std::vector<std::size_t> pairs(bins, 0), hits(bins, 0);
    std::vector<double> similarity(bins, 0), theory(bins, 0);
    for (const auto& e : manifest) {
      const auto b = bin_of(e.similarity);
      ++pairs[b];
      similarity[b] += e.similarity;
      theory[b] += amplified_probability(e.similarity, point.bands, point.repetitions);
    }
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
      const auto randomness = trial_randomness(stream.universe, options.seed, trial);
      const auto sketches = sketch_subset(stream, ids, randomness, point.buckets);
      LshIndex index(cfg, randomness);
      for (SetId id : ids) index.insert(id, sketches.at(id));
      std::set<std::pair<SetId, SetId>> found;
      for (const auto& c : index.candidates().pairs) found.emplace(c.id_a, c.id_b);
      for (const auto& e : manifest) {
        if (found.contains(std::minmax(e.a, e.b))) ++hits[bin_of(e.similarity)];
      }
    }
    for (std::size_t b = 0; b < bins; ++b) {
      if (pairs[b] == 0) continue;
      const auto n = static_cast<double>(pairs[b]);
      rows.push_back({point, static_cast<double>(b) * options.bin_width, pairs[b], similarity[b] / n,
                      static_cast<double>(hits[b]) / (n * static_cast<double>(options.trials)),
                      theory[b] / n});
    }
  }
  return rows;
}

TimingRow timing_report(const StreamFile& stream, const std::vector<ItemSet>& sets,
                        std::uint64_t buckets, double alpha, AlphaMapping mapping,
                        std::uint64_t seed) {
  check_alpha(alpha);
  if (sets.size() != stream.sets) throw InputError("exact sets do not match the stream");
  TimingRow row;
  row.sets = sets.size();
  row.pairs = sets.size() < 2 ? 0 : sets.size() * (sets.size() - 1) / 2;
  row.buckets = buckets;
  row.alpha = alpha;
  const auto jaccard = RationalSimilarity::jaccard(stream.universe);

  volatile double sink = 0;
  auto start = Clock::now();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) sink = sink + exact_similarity(jaccard, sets[i], sets[j]);
  }
  row.exact_seconds = seconds_since(start);

  const auto randomness = trial_randomness(stream.universe, seed, 0);
  start = Clock::now();
  std::vector<LevelSketch> sketches(stream.sets, LevelSketch(randomness, buckets));
  for (const auto& u : stream.updates) sketches[u.set].update(u.item, u.value);
  row.sketch_build_seconds = seconds_since(start);

  start = Clock::now();
  for (std::size_t i = 0; i < sketches.size(); ++i) {
    for (std::size_t j = i + 1; j < sketches.size(); ++j) {
      const int level = comparison_row(mapping, alpha, sketches[i].cardinality(),
                                       sketches[j].cardinality(), sketches[i].max_level());
      sink = sink + similarity_at_level(sketches[i], sketches[j], level, jaccard);
    }
  }
  row.sketch_query_seconds = seconds_since(start);
  if (row.pairs > 0) {
    const double sketch_total = row.sketch_build_seconds + row.sketch_query_seconds;
    row.speedup = sketch_total > 0 ? row.exact_seconds / sketch_total
                                   : std::numeric_limits<double>::infinity();
  }
  return row;
}

void write_deviation_csv(std::ostream& out, const std::vector<DeviationRow>& rows, bool with_timings) {
  out << "buckets,alpha,mean_dev_high,mean_dev_low,mean_dev_total,high_pairs,low_pairs";
  if (with_timings) out << ",build_seconds,query_seconds";
  out << '\n';
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.buckets << ',' << r.alpha << ',' << r.mean_high << ',' << r.mean_low << ','
        << r.mean_total << ',' << r.high_pairs << ',' << r.low_pairs;
    if (with_timings) out << ',' << r.build_seconds << ',' << r.query_seconds;
    out << '\n';
  }
  out.precision(precision);
}

void write_scurve_csv(std::ostream& out, const std::vector<ScurveRow>& rows) {
  out << "bands,repetitions,alpha,buckets,bin_lo,pairs,mean_similarity,empirical,theoretical\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.point.bands << ',' << r.point.repetitions << ',' << r.point.alpha << ','
        << r.point.buckets << ',' << r.bin_lo << ',' << r.pairs << ',' << r.mean_similarity << ','
        << r.empirical << ',' << r.theoretical << '\n';
  }
  out.precision(precision);
}

void write_timing_csv(std::ostream& out, const TimingRow& r) {
  out << "sets,pairs,buckets,alpha,exact_seconds,sketch_build_seconds,sketch_query_seconds,speedup\n";
  const auto precision = out.precision(6);
  out << r.sets << ',' << r.pairs << ',' << r.buckets << ',' << r.alpha << ',' << r.exact_seconds
      << ',' << r.sketch_build_seconds << ',' << r.sketch_query_seconds << ',';
  if (r.speedup) {
    out << *r.speedup;
  } else {
    out << "n/a";
  }
  out << '\n';
  out.precision(precision);
}

}  // namespace dynsim::bench
