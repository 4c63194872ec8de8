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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dynsim/bench/generator.hpp"
#include "dynsim/bench/stream_file.hpp"

namespace dynsim::bench {

/// How a sampling rate α selects the sketch row that is compared.
///
/// kInclusion: α is the per-item inclusion probability of the row,
///   row = clamp(⌈log2(1/α)⌉ − 1, 0, max); the same row for every set.
/// kCardinality: α plays the role of the sampling parameter p, so a set of
///   s items is read at the row whose inclusion rate 2^-k has
///   k = ⌊log2(α·s)⌋, leaving about 1/α sampled items whatever the set size.
///   Larger α means fewer sampled items.
enum class AlphaMapping { kInclusion, kCardinality };

AlphaMapping parse_alpha_mapping(const std::string& name);
std::string to_string(AlphaMapping mapping);

int inclusion_row(double alpha, int max_level);
int cardinality_row(double alpha, std::int64_t cardinality, int max_level);

/// Row used to compare a pair with cardinalities (sa, sb): under the
/// cardinality mapping the smaller set decides.
int comparison_row(AlphaMapping mapping, double alpha, std::int64_t sa, std::int64_t sb,
                   int max_level);

struct BucketRate {
  std::uint64_t buckets = 256;
  double alpha = 0.025;
};

/// The bucket / rate combinations singled out as good trade-offs on the
/// synthetic benchmark.
std::vector<BucketRate> recommended_bucket_rates();

struct DeviationOptions {
  std::vector<BucketRate> grid = recommended_bucket_rates();
  std::size_t repetitions = 10;
  double split = 0.2;
  AlphaMapping mapping = AlphaMapping::kCardinality;
  std::uint64_t seed = 1;
};

struct DeviationRow {
  std::uint64_t buckets = 0;
  double alpha = 0;
  double mean_high = 0;   // mean |estimate − exact| over pairs with exact ≥ split
  double mean_low = 0;    // same over pairs below the split
  double mean_total = 0;  // over all pairs
  std::size_t high_pairs = 0;
  std::size_t low_pairs = 0;
  double build_seconds = 0;  // per repetition
  double query_seconds = 0;
};

/// Jaccard estimates of every manifest pair from one sketch row, averaged
/// over `repetitions` independent seeds.
std::vector<DeviationRow> deviation_report(const StreamFile& stream,
                                           const std::vector<ManifestEntry>& manifest,
                                           const DeviationOptions& options);

struct ScurvePoint {
  std::size_t bands = 10;
  std::size_t repetitions = 40;
  double alpha = 0.005;
  std::uint64_t buckets = 1024;
};

struct ScurveOptions {
  std::vector<ScurvePoint> grid = {ScurvePoint{}};
  std::size_t trials = 10;
  double r1 = 0.5;  // cardinality window of the index
  double bin_width = 0.05;
  AlphaMapping mapping = AlphaMapping::kCardinality;
  std::uint64_t seed = 1;
};

struct ScurveRow {
  ScurvePoint point;
  double bin_lo = 0;
  std::size_t pairs = 0;          // manifest pairs in the bin
  double mean_similarity = 0;     // exact, averaged over the bin
  double empirical = 0;           // fraction of (pair, trial) that became candidates
  double theoretical = 0;         // mean of 1 − (1 − s^r)^l over the bin's pairs
};

/// Runs the sketch LSH index over the manifest's sets at every grid point
/// and bins candidate frequencies by exact similarity. Only sets named in
/// the manifest are indexed.
std::vector<ScurveRow> scurve_report(const StreamFile& stream,
                                     const std::vector<ManifestEntry>& manifest,
                                     const ScurveOptions& options);

struct TimingRow {
  std::size_t sets = 0;
  std::size_t pairs = 0;
  std::uint64_t buckets = 0;
  double alpha = 0;
  double exact_seconds = 0;         // all-pairs Jaccard on the raw sets
  double sketch_build_seconds = 0;  // replaying the stream into sketches
  double sketch_query_seconds = 0;  // all-pairs Jaccard on one sketch row per pair
  std::optional<double> speedup;    // exact / (build + query); absent without pairs
};

TimingRow timing_report(const StreamFile& stream, const std::vector<ItemSet>& sets,
                        std::uint64_t buckets, double alpha, AlphaMapping mapping,
                        std::uint64_t seed);

void write_deviation_csv(std::ostream& out, const std::vector<DeviationRow>& rows,
                         bool with_timings);
void write_scurve_csv(std::ostream& out, const std::vector<ScurveRow>& rows);
void write_timing_csv(std::ostream& out, const TimingRow& row);

}  // namespace dynsim::bench
