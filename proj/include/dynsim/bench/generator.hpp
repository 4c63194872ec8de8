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
#include <istream>
#include <ostream>
#include <vector>

#include "dynsim/bench/stream_file.hpp"
#include "dynsim/lsh_index.hpp"

namespace dynsim::bench {

struct SimilarityRange {
  double lo = 0;
  double hi = 1;
  double weight = 1;  // only used by weighted draws
};

/// The six planted Jaccard intervals of the synthetic benchmark.
std::vector<SimilarityRange> default_planted_ranges();

/// Skewed similarity histogram (bins of width 0.05
/// from 0.1 to 0.8, weighted by pair counts), for --distribution runs.
std::vector<SimilarityRange> distribution_ranges();

struct GeneratorConfig {
  std::uint64_t rows = 1000;  // base rows; planted partners are appended after their source
  std::uint64_t columns = 10'000;
  double density_lo = 0.01;
  double density_hi = 0.05;
  std::vector<SimilarityRange> planted = default_planted_ranges();
  std::uint64_t plant_every = 100;
  bool weighted_draw = false;  // draw ranges by weight instead of cycling
  bool churn = false;          // add insert/delete pairs that cancel, then shuffle
  double churn_fraction = 0.3;  // extra cancelling items per row, relative to its size
  std::uint64_t seed = 1;
};

struct ManifestEntry {
  SetId a = 0;
  SetId b = 0;
  double target_lo = 0;
  double target_hi = 0;
  double similarity = 0;  // exact Jaccard of the realized sets
  bool planted = false;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct GeneratedCorpus {
  StreamFile stream;
  std::vector<ManifestEntry> manifest;
};

/// Per-item flip probabilities that turn a row of `size` items into a copy
/// with expected Jaccard similarity `target` and unchanged expected size:
/// delete with probability (1 − t)/(1 + t), add with probability
/// delete·size/(d − size).
struct FlipRates {
  double remove = 0;
  double add = 0;
};
FlipRates flip_rates(double target, std::uint64_t size, std::uint64_t d);

/// Synthetic corpus: rows of uniformly random density, and after every
/// `plant_every`-th row a partner built by flipping an exact number of its
/// items so the realized similarity lands inside the planted range. The
/// manifest lists every planted pair plus one random background pair per
/// planted pair. Throws InputError when a range cannot be hit.
GeneratedCorpus generate(const GeneratorConfig& cfg);

/// `# ...` comment lines are skipped by the reader.
void write_manifest(std::ostream& out, const std::vector<ManifestEntry>& manifest);
std::vector<ManifestEntry> read_manifest(std::istream& in);

}  // namespace dynsim::bench
