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

// Dynamic-stream text format. A header line `n d` followed by one update
// per line, `j i v`, with j in [0, n), i in [0, d) and v in {+1, -1}
// (written as 1 / -1 / +1). Fields are whitespace-separated; blank lines
// and lines starting with '#' are ignored. Updates may arrive in any order
// but every (j, i) must replay to a net count of 0 or 1.

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <vector>

#include "dynsim/level_sketch.hpp"
#include "dynsim/similarity.hpp"

namespace dynsim::bench {

struct Update {
  std::uint32_t set = 0;
  Item item = 0;
  int value = 1;

  friend bool operator==(const Update&, const Update&) = default;
};

struct StreamFile {
  std::uint64_t sets = 0;  // n
  std::uint64_t universe = 1;  // d
  std::vector<Update> updates;
};

/// Throws ParseError carrying the offending line number.
StreamFile read_stream(std::istream& in);
void write_stream(std::ostream& out, const StreamFile& stream);

/// Net item sets after replay. Throws DataError when a net count leaves {0, 1}.
std::vector<ItemSet> net_sets(const StreamFile& stream);

/// Exact sets plus one sketch per set, all sharing one randomness.
struct Corpus {
  std::uint64_t universe = 1;
  std::vector<ItemSet> sets;
  std::vector<LevelSketch> sketches;
};

/// Replays every update (deletions included) into fresh sketches.
Corpus ingest(const StreamFile& stream, std::shared_ptr<const SketchRandomness> randomness,
              std::uint64_t buckets);

/// Same, reusing already-validated net sets.
Corpus ingest(const StreamFile& stream, std::vector<ItemSet> sets,
              std::shared_ptr<const SketchRandomness> randomness, std::uint64_t buckets);

}  // namespace dynsim::bench
