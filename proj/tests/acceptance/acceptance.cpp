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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below; oracles are computed here, not taken
// from the library under test.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dynsim/bench/generator.hpp"
#include "dynsim/bench/reports.hpp"
#include "dynsim/bench/stream_file.hpp"
#include "dynsim/hashing.hpp"
#include "dynsim/l0_distance.hpp"
#include "dynsim/level_sketch.hpp"
#include "dynsim/lsh_index.hpp"
#include "dynsim/similarity.hpp"
#include "support.hpp"

namespace dynsim {
namespace {

using Clock = std::chrono::steady_clock;
using testing::jaccard_oracle;
using testing::planted_pair;
using testing::random_set;
using testing::sketch_of;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, fmt, args...);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::shared_ptr<const SketchRandomness> randomness(std::uint64_t d, std::uint64_t seed) {
  return std::make_shared<const SketchRandomness>(d, seed);
}

// 1. Sketch of a turnstile stream equals the sketch of its net insertions.
Outcome deletion_soundness() {
  constexpr int kStreams = 100;
  constexpr std::size_t kSets = 50;
  constexpr std::uint64_t kD = 1 << 14;
  constexpr double kDeleteShare = 0.3;
  constexpr double kBudgetSeconds = 5;
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  int equal = 0;
  for (int stream = 0; stream < kStreams; ++stream) {
    const auto r = randomness(kD, 5000 + stream);
    const std::size_t updates = 1 + rng() % 10'000;
    std::vector<LevelSketch> replayed(kSets, LevelSketch(r, 256));
    std::vector<std::set<Item>> live(kSets);
    std::uniform_int_distribution<std::size_t> pick_set(0, kSets - 1);
    std::uniform_int_distribution<Item> pick_item(0, kD - 1);
    std::bernoulli_distribution deleting(kDeleteShare);
    for (std::size_t u = 0; u < updates; ++u) {
      const auto j = pick_set(rng);
      if (deleting(rng) && !live[j].empty()) {
        auto it = live[j].begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng() % live[j].size()));
        replayed[j].erase(*it);
        live[j].erase(it);
      } else {
        Item item = pick_item(rng);
        while (live[j].contains(item)) item = pick_item(rng);
        replayed[j].insert(item);
        live[j].insert(item);
      }
    }
    bool all_equal = true;
    for (std::size_t j = 0; j < kSets; ++j) {
      LevelSketch net(r, 256);
      for (Item item : live[j]) net.insert(item);
      all_equal = all_equal && net == replayed[j];
    }
    equal += all_equal;
  }
  const double elapsed = seconds_since(start);
  return {equal == kStreams && elapsed < kBudgetSeconds,
          format("%d/%d streams identical, %.2f s (budget %.0f s)", equal, kStreams, elapsed,
                 kBudgetSeconds)};
}

// Distance 1 − S from cell counts; a vanishing denominator means S = 1.
double oracle_distance(const std::array<double, 4>& q, unsigned a, unsigned b, int d) {
  const double both = std::popcount(a & b);
  const double sym = std::popcount(a ^ b);
  const double neither = d - std::popcount(a | b);
  const double num = q[0] * both + q[1] * neither + q[2] * sym;
  const double den = q[0] * both + q[1] * neither + q[3] * sym;
  return den == 0 ? 0.0 : 1.0 - num / den;
}

bool triangle_holds(const std::array<double, 4>& q, int d) {
  const unsigned n = 1U << d;
  std::vector<double> table(n * n);
  for (unsigned a = 0; a < n; ++a) {
    for (unsigned b = 0; b < n; ++b) table[a * n + b] = oracle_distance(q, a, b, d);
  }
  for (unsigned a = 0; a < n; ++a) {
    for (unsigned b = 0; b < n; ++b) {
      for (unsigned c = 0; c < n; ++c) {
        if (table[a * n + c] > table[a * n + b] + table[b * n + c] + 1e-12) return false;
      }
    }
  }
  return true;
}

// 2. is_metric agrees with exhaustive triangle checks on subsets of [5].
Outcome metric_predicate() {
  constexpr int kQuadruples = 200;
  constexpr int kD = 5;
  constexpr double kBudgetSeconds = 60;
  const auto start = Clock::now();
  std::mt19937_64 rng(202);
  // coefficients on a quarter grid over [0, 3]; z < z' keeps S from being constant
  std::uniform_int_distribution<int> grid(0, 12);
  int agree = 0;
  int metric = 0;
  std::string first_mismatch;
  for (int i = 0; i < kQuadruples; ++i) {
    std::array<double, 4> q{};
    do {
      for (double& v : q) v = grid(rng) / 4.0;
    } while (q[2] >= q[3]);
    const bool predicate = is_metric(RationalSimilarity(q[0], q[1], q[2], q[3], kD));
    const bool brute = triangle_holds(q, kD);
    metric += brute;
    if (predicate == brute) {
      ++agree;
    } else if (first_mismatch.empty()) {
      first_mismatch = format(" first mismatch (%.2f,%.2f,%.2f,%.2f)", q[0], q[1], q[2], q[3]);
    }
  }
  const double elapsed = seconds_since(start);
  return {agree == kQuadruples && elapsed < kBudgetSeconds,
          format("%d/%d agree (%d metric), %.2f s (budget %.0f s)", agree, kQuadruples, metric,
                 elapsed, kBudgetSeconds) +
              first_mismatch};
}

// 3. Signature collision frequency tracks the Jaccard of nonzero patterns.
Outcome minhash_law() {
  constexpr int kPairs = 50;
  constexpr std::uint64_t kBuckets = 256;
  constexpr int kSeeds = 10'000;
  constexpr double kTolerance = 0.03;
  std::mt19937_64 rng(303);
  double worst = 0;
  for (int pair = 0; pair < kPairs; ++pair) {
    std::vector<std::uint64_t> a;
    std::vector<std::uint64_t> b;
    const double pa = 0.05 + 0.9 * std::uniform_real_distribution<double>()(rng);
    const double pb = 0.05 + 0.9 * std::uniform_real_distribution<double>()(rng);
    std::bernoulli_distribution in_a(pa);
    std::bernoulli_distribution in_b(pb);
    for (std::uint64_t l = 0; l < kBuckets; ++l) {
      if (in_a(rng)) a.push_back(l);
      if (in_b(rng)) b.push_back(l);
    }
    if (a.empty()) a.push_back(0);
    if (b.empty()) b.push_back(1);
    std::vector<std::uint64_t> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    const double exact = static_cast<double>(both.size()) / static_cast<double>(a.size() + b.size() - both.size());
    int hits = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      const auto spec = SketchRandomness(kBuckets, 7'000'000 + pair * kSeeds + seed).minhash_seed(0, 0);
      hits += minhash_signature(std::span<const std::uint64_t>(a), spec) ==
              minhash_signature(std::span<const std::uint64_t>(b), spec);
    }
    worst = std::max(worst, std::abs(static_cast<double>(hits) / kSeeds - exact));
  }
  return {worst <= kTolerance, format("max |freq - J| = %.4f over %d pairs (tolerance %.2f)", worst,
                                      kPairs, kTolerance)};
}

// 4. Estimate at the prescribed level stays within (1 ± eps)·J often enough.
Outcome concentration() {
  constexpr std::uint64_t kD = 1 << 20;
  constexpr std::size_t kSize = 4096;
  constexpr std::size_t kShared = 2731;  // J = 2731 / 5461 ≈ 0.5
  constexpr double kTarget = 0.5;
  constexpr double kEps = 0.5;
  constexpr double kDelta = 0.1;
  constexpr double kR = 0.4;
  constexpr int kSeeds = 1000;
  const double required = 1 - 2 * kDelta;
  const auto params = RationalSimilarity::jaccard(kD);
  std::mt19937_64 rng(404);
  int inside = 0;
  int row = -1;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const auto r = randomness(kD, 40'000 + seed);
    const auto [a, b] = planted_pair(rng, kSize, kSize, kShared, kD);
    const auto sa = sketch_of(r, 1024, a);
    const auto sb = sketch_of(r, 1024, b);
    row = sketch_row_for(sample_level(params, kEps, kDelta, kR, kSize, sa.max_level()), sa.max_level());
    const double estimate = similarity_at_level(sa, sb, row, params);
    inside += estimate > (1 - kEps) * kTarget && estimate < (1 + kEps) * kTarget;
  }
  const double fraction = static_cast<double>(inside) / kSeeds;
  return {fraction >= required, format("row %d, %.3f of %d seeds inside (%.2f, %.2f) (need >= %.2f)", row,
                                       fraction, kSeeds, (1 - kEps) * kTarget, (1 + kEps) * kTarget,
                                       required)};
}

// 5. Median distance estimates are accurate and ordered.
Outcome distance_estimator() {
  constexpr std::uint64_t kD = 1 << 20;
  constexpr std::size_t kSize = 2000;
  constexpr std::size_t kReps = 9;
  constexpr int kSeeds = 200;
  constexpr double kRelative = 0.5;
  constexpr double kRequired = 0.9;
  const std::vector<double> targets{0.1, 0.3, 0.5, 0.7, 0.9};
  std::mt19937_64 rng(505);
  bool pass = true;
  double previous_mean = -1;
  std::string detail;
  for (double target : targets) {
    int good = 0;
    double sum = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      const auto [a, b] = testing::pair_at_distance(rng, kSize, target, kD);
      const double exact = 1 - jaccard_oracle(a, b);
      DistanceEstimator estimator(RationalSimilarity::jaccard(kD),
                                  make_repetitions(kD, 50'000 + seed * 16 + std::llround(target * 10), kReps),
                                  1024);
      std::vector<LevelSketch> sa;
      std::vector<LevelSketch> sb;
      for (std::size_t rep = 0; rep < kReps; ++rep) {
        sa.push_back(sketch_of(estimator.randomness(rep), 1024, a));
        sb.push_back(sketch_of(estimator.randomness(rep), 1024, b));
      }
      const double estimate = estimator.estimate_distance(std::span<const LevelSketch>(sa),
                                                          std::span<const LevelSketch>(sb));
      good += std::abs(estimate - exact) <= kRelative * exact;
      sum += estimate;
    }
    const double fraction = static_cast<double>(good) / kSeeds;
    const double mean = sum / kSeeds;
    pass = pass && fraction >= kRequired && mean > previous_mean;
    previous_mean = mean;
    detail += format("%s%.1f: %.3f ok, mean %.3f", detail.empty() ? "" : "; ", target, fraction, mean);
  }
  return {pass, detail + format(" (need >= %.2f ok, increasing means)", kRequired)};
}

// 6. Distinct-count estimates within 20% relative error.
Outcome l0_accuracy() {
  constexpr std::uint64_t kD = 1 << 20;
  constexpr int kSeeds = 200;
  constexpr double kRelative = 0.2;
  constexpr double kRequired = 0.9;
  std::mt19937_64 rng(606);
  bool pass = true;
  std::string detail;
  for (std::size_t size : {std::size_t{10}, std::size_t{1000}, std::size_t{100'000}}) {
    int good = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      const auto r = randomness(kD, 60'000 + seed * 8 + size % 7);
      const double estimate = l0_estimate(sketch_of(r, 1024, random_set(rng, size, kD)));
      good += std::abs(estimate - static_cast<double>(size)) <= kRelative * static_cast<double>(size);
    }
    const double fraction = static_cast<double>(good) / kSeeds;
    pass = pass && fraction >= kRequired;
    detail += format("%s|A|=%zu: %.3f", detail.empty() ? "" : "; ", size, fraction);
  }
  return {pass, detail + format(" within %.0f%% (need >= %.2f)", kRelative * 100, kRequired)};
}

// 7. Banded min-hash on raw sets follows 1 − (1 − s^r)^l.
Outcome amplification() {
  constexpr std::size_t kBands = 10;
  constexpr std::size_t kTables = 40;
  constexpr int kTrials = 500;
  constexpr double kTolerance = 0.1;
  constexpr std::uint64_t kD = 100'000;
  std::mt19937_64 rng(707);
  bool pass = true;
  std::string detail;
  for (double s : {0.3, 0.5, 0.7}) {
    // A ⊂ B with |A| = s·|B| gives J = s exactly
    const auto b = random_set(rng, 1000, kD);
    std::vector<Item> prefix(b.members().begin(), b.members().end());
    std::shuffle(prefix.begin(), prefix.end(), rng);
    prefix.resize(static_cast<std::size_t>(std::llround(1000 * s)));
    const ItemSet a(std::move(prefix));
    const double exact = jaccard_oracle(a, b);
    int hits = 0;
    for (int trial = 0; trial < kTrials; ++trial) {
      MinHashBaseline baseline(kBands, kTables, 70'000 + trial * 3 + std::llround(s * 10));
      baseline.insert(0, a);
      baseline.insert(1, b);
      hits += !baseline.candidates().pairs.empty();
    }
    const double empirical = static_cast<double>(hits) / kTrials;
    const double theory = testing::banding_oracle(exact, kBands, kTables);
    pass = pass && std::abs(empirical - theory) <= kTolerance;
    detail += format("%ss=%.1f: %.3f vs %.3f", detail.empty() ? "" : "; ", exact, empirical, theory);
  }
  return {pass, detail + format(" (tolerance %.1f)", kTolerance)};
}

bench::GeneratedCorpus default_recipe_corpus(std::uint64_t rows, std::uint64_t columns, double density_lo,
                                           double density_hi, std::uint64_t seed) {
  bench::GeneratorConfig cfg;
  cfg.rows = rows;
  cfg.columns = columns;
  cfg.density_lo = density_lo;
  cfg.density_hi = density_hi;
  cfg.seed = seed;
  return bench::generate(cfg);
}

std::string deviation_cells(const std::vector<bench::DeviationRow>& rows, double& worst) {
  std::string out;
  worst = 0;
  for (const auto& row : rows) {
    worst = std::max(worst, row.mean_total);
    out += format("%s(%llu,%.3f)=%.3f", out.empty() ? "" : " ",
                  static_cast<unsigned long long>(row.buckets), row.alpha, row.mean_total);
  }
  return out;
}

// 8. Mean total deviation on the synthetic corpus at the recommended grid.
Outcome deviation() {
  constexpr double kTolerance = 0.15;
  constexpr double kBudgetSeconds = 600;
  const auto corpus = default_recipe_corpus(1000, 10'000, 0.01, 0.05, 808);
  bench::DeviationOptions options;
  options.repetitions = 10;
  options.seed = 808;
  options.mapping = bench::AlphaMapping::kCardinality;
  const auto start = Clock::now();
  const auto rows = bench::deviation_report(corpus.stream, corpus.manifest, options);
  const double elapsed = seconds_since(start);
  double worst = 0;
  const auto cells = deviation_cells(rows, worst);

  options.mapping = bench::AlphaMapping::kInclusion;
  double inclusion_worst = 0;
  const auto inclusion = deviation_cells(bench::deviation_report(corpus.stream, corpus.manifest, options),
                                         inclusion_worst);
  return {worst <= kTolerance && elapsed < kBudgetSeconds,
          format("cardinality mapping %s, max %.3f (tolerance %.2f), %.1f s; inclusion mapping (info) ",
                 cells.c_str(), worst, kTolerance, elapsed) +
              inclusion + format(", max %.3f", inclusion_worst)};
}

// 9. Single-table collision rates separate high from low pairs.
Outcome sensitivity() {
  constexpr std::uint64_t kD = 1 << 20;
  constexpr int kPairs = 300;
  constexpr double kSeparation = 0.1;
  const auto cfg = LshConfig::from_accuracy(0.5, 0.1, 0.5, 0.1);
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<std::size_t> size(100, 400);
  std::vector<LabeledSketchPair<std::int64_t>> pairs;
  for (int i = 0; i < kPairs; ++i) {
    const auto r = randomness(kD, 90'000 + i);
    const std::size_t n = size(rng);
    // J = m / (2n − m): m = 0.75·n gives 0.6, m = 0.095·n gives 0.05
    for (double share : {0.75, 0.095}) {
      const auto [a, b] = planted_pair(rng, n, n, static_cast<std::size_t>(std::llround(share * n)), kD);
      pairs.push_back({sketch_of(r, 1024, a), sketch_of(r, 1024, b), jaccard_oracle(a, b)});
    }
  }
  const auto report = sensitivity_report(std::span<const LabeledSketchPair<std::int64_t>>(pairs), cfg);
  const double low_cap = std::min(1.0, cfg.low_collision_bound());
  const bool pass = report.high_pairs == kPairs && report.low_pairs == kPairs &&
                    report.p_high >= cfg.high_collision_bound() && report.p_low <= low_cap &&
                    report.p_low <= report.p_high - kSeparation;
  return {pass, format("p_high %.3f over %zu pairs (need >= %.2f), p_low %.3f over %zu pairs "
                       "(need <= %.3f and <= p_high - %.1f)",
                       report.p_high, report.high_pairs, cfg.high_collision_bound(), report.p_low,
                       report.low_pairs, low_cap, kSeparation)};
}

// 10. Sketch all-pairs beats exact all-pairs on a dense corpus.
Outcome timing() {
  const auto corpus = default_recipe_corpus(1000, 100'000, 0.05, 0.05, 1010);
  const auto sets = bench::net_sets(corpus.stream);
  const auto row = bench::timing_report(corpus.stream, sets, 256, 0.01, bench::AlphaMapping::kCardinality, 1010);
  const double speedup = row.speedup.value_or(0);
  return {speedup > 1, format("%zu sets, exact %.2f s, sketch build %.2f s + query %.2f s, speedup %.2f (need > 1)",
                              row.sets, row.exact_seconds, row.sketch_build_seconds,
                              row.sketch_query_seconds, speedup)};
}

}  // namespace
}  // namespace dynsim

int main() {
  using Criterion = std::pair<const char*, std::function<dynsim::Outcome()>>;
  const std::vector<Criterion> criteria{
      {"deletion soundness", dynsim::deletion_soundness},
      {"metric predicate", dynsim::metric_predicate},
      {"min-hash collision law", dynsim::minhash_law},
      {"level concentration", dynsim::concentration},
      {"distance estimator", dynsim::distance_estimator},
      {"l0 estimator", dynsim::l0_accuracy},
      {"amplification curve", dynsim::amplification},
      {"end-to-end deviation", dynsim::deviation},
      {"sensitivity", dynsim::sensitivity},
      {"timing", dynsim::timing},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto outcome = criteria[i].second();
    failures += !outcome.pass;
    std::printf("%s %zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
