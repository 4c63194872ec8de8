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

// dynsim: benchmark and utility front end for the dynsim library.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynsim/bench/generator.hpp"
#include "dynsim/bench/reports.hpp"
#include "dynsim/bench/stream_file.hpp"
#include "dynsim/errors.hpp"
#include "dynsim/l0_distance.hpp"
#include "dynsim/lsh_index.hpp"

namespace {

using namespace dynsim;
using namespace dynsim::bench;

constexpr int kUsageError = 2;

constexpr const char* kAlphaHelp =
    "How a sampling rate alpha selects the compared sketch row. "
    "'inclusion': alpha is the per-item inclusion probability; level "
    "ceil(log2(1/alpha)) keeps items with probability alpha, and it is stored "
    "in row ceil(log2(1/alpha)) - 1 because the lsb level of an item starts at 0. "
    "'cardinality': alpha plays the role of the sampling parameter p; level "
    "floor(log2(alpha*s)) for the smaller set size s, so about 1/alpha items "
    "survive regardless of set size, again read one row shallower.";

struct Output {
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw InputError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file.is_open() ? static_cast<std::ostream&>(file) : std::cout; }
  std::ofstream file;
};

StreamFile load_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_stream(in);
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_manifest(in);
}

// `# dynsim <command> key=value ...`, the first line of every report.
class Echo {
 public:
  explicit Echo(const std::string& command) { line_ << "# dynsim " << command; }
  template <typename T>
  Echo& add(const std::string& key, const T& value) {
    line_ << ' ' << key << '=' << value;
    return *this;
  }
  template <typename T>
  Echo& add_list(const std::string& key, const std::vector<T>& values) {
    line_ << ' ' << key << '=';
    for (std::size_t i = 0; i < values.size(); ++i) line_ << (i ? ";" : "") << values[i];
    return *this;
  }
  void write(std::ostream& out) const { out << line_.str() << '\n'; }

 private:
  std::ostringstream line_;
};

struct Options {
  std::uint64_t seed = 1;
  std::string in;
  std::string manifest;
  std::string out;
  std::vector<std::uint64_t> buckets;
  std::vector<double> alpha;
  std::string alpha_mapping = "cardinality";
  double r1 = 0.5;
  double r2 = 0.1;
  double eps = 0.5;
  double delta = 0.1;
  std::optional<double> p;
  std::size_t bands = 1;
  std::optional<std::size_t> reps;
  double split = 0.2;
  std::optional<double> threshold;
  bool churn = false;
  bool distribution = false;
  bool with_timings = false;
  std::uint64_t rows = 1000;
  std::uint64_t cols = 10'000;
  double density_lo = 0.01;
  double density_hi = 0.05;
  std::uint64_t plant_every = 100;
  std::size_t trials = 10;
  std::size_t median_reps = 1;
};

void run_generate(const Options& o) {
  GeneratorConfig cfg;
  cfg.rows = o.rows;
  cfg.columns = o.cols;
  cfg.density_lo = o.density_lo;
  cfg.density_hi = o.density_hi;
  cfg.plant_every = o.plant_every;
  cfg.churn = o.churn;
  cfg.seed = o.seed;
  if (o.distribution) {
    cfg.planted = distribution_ranges();
    cfg.weighted_draw = true;
  }
  const auto corpus = generate(cfg);
  Output out(o.out);
  write_stream(out.stream(), corpus.stream);
  if (!o.manifest.empty()) {
    Output manifest(o.manifest);
    Echo("generate")
        .add("seed", o.seed).add("rows", o.rows).add("cols", o.cols)
        .add("density", std::to_string(o.density_lo) + ":" + std::to_string(o.density_hi))
        .add("plant_every", o.plant_every).add("churn", o.churn).add("distribution", o.distribution)
        .write(manifest.stream());
    write_manifest(manifest.stream(), corpus.manifest);
  }
}

void run_ingest(const Options& o) {
  const auto stream = load_stream(o.in);
  const std::uint64_t buckets = o.buckets.empty() ? 256 : o.buckets.front();
  const auto corpus =
      ingest(stream, std::make_shared<const SketchRandomness>(stream.universe, o.seed), buckets);
  Output out(o.out);
  Echo("ingest").add("seed", o.seed).add("buckets", buckets).add("sets", stream.sets)
      .add("d", stream.universe).add("updates", stream.updates.size()).write(out.stream());
  out.stream() << "set,cardinality,l0_estimate\n";
  for (std::size_t j = 0; j < corpus.sketches.size(); ++j) {
    out.stream() << j << ',' << corpus.sketches[j].cardinality() << ','
                 << l0_estimate(corpus.sketches[j]) << '\n';
  }
}

std::vector<BucketRate> grid_from(const Options& o) {
  if (o.buckets.empty() && o.alpha.empty()) return recommended_bucket_rates();
  if (o.buckets.size() != o.alpha.size()) {
    throw InputError("--buckets and --alpha must be given the same number of times");
  }
  std::vector<BucketRate> grid;
  for (std::size_t i = 0; i < o.buckets.size(); ++i) grid.push_back({o.buckets[i], o.alpha[i]});
  return grid;
}

void run_deviation(const Options& o) {
  const auto stream = load_stream(o.in);
  const auto manifest = load_manifest(o.manifest);
  DeviationOptions options;
  options.grid = grid_from(o);
  options.repetitions = o.reps.value_or(10);
  options.split = o.split;
  options.mapping = parse_alpha_mapping(o.alpha_mapping);
  options.seed = o.seed;
  const auto rows = deviation_report(stream, manifest, options);
  Output out(o.out);
  std::vector<std::string> cells;
  for (const auto& c : options.grid) cells.push_back(std::to_string(c.buckets) + ":" + std::to_string(c.alpha));
  Echo("deviation").add("seed", o.seed).add_list("grid", cells).add("reps", options.repetitions)
      .add("split", o.split).add("alpha_mapping", o.alpha_mapping).write(out.stream());
  write_deviation_csv(out.stream(), rows, o.with_timings);
}

void run_scurve(const Options& o) {
  const auto stream = load_stream(o.in);
  const auto manifest = load_manifest(o.manifest);
  ScurveOptions options;
  options.grid.clear();
  const auto buckets = o.buckets.empty() ? std::vector<std::uint64_t>{1024} : o.buckets;
  const auto alphas = o.alpha.empty() ? std::vector<double>{0.005} : o.alpha;
  for (auto b : buckets) {
    for (double a : alphas) options.grid.push_back({o.bands, o.reps.value_or(1), a, b});
  }
  options.trials = o.trials;
  options.r1 = o.r1;
  options.mapping = parse_alpha_mapping(o.alpha_mapping);
  options.seed = o.seed;
  const auto rows = scurve_report(stream, manifest, options);
  Output out(o.out);
  Echo("scurve").add("seed", o.seed).add("bands", o.bands).add("reps", o.reps.value_or(1))
      .add_list("buckets", buckets).add_list("alpha", alphas).add("trials", o.trials)
      .add("r1", o.r1).add("alpha_mapping", o.alpha_mapping).write(out.stream());
  write_scurve_csv(out.stream(), rows);
}

void run_timing(const Options& o) {
  const auto stream = load_stream(o.in);
  const auto sets = net_sets(stream);
  const std::uint64_t buckets = o.buckets.empty() ? 256 : o.buckets.front();
  const double alpha = o.alpha.empty() ? 0.01 : o.alpha.front();
  const auto row = timing_report(stream, sets, buckets, alpha, parse_alpha_mapping(o.alpha_mapping), o.seed);
  Output out(o.out);
  Echo("timing").add("seed", o.seed).add("buckets", buckets).add("alpha", alpha)
      .add("alpha_mapping", o.alpha_mapping).write(out.stream());
  write_timing_csv(out.stream(), row);
}

void run_lsh(const Options& o) {
  const auto stream = load_stream(o.in);
  const std::uint64_t buckets = o.buckets.empty() ? 1024 : o.buckets.front();
  auto cfg = LshConfig::from_accuracy(o.r1, o.r2, o.eps, o.delta, o.bands, o.reps.value_or(1));
  if (o.p) cfg.p = *o.p;
  cfg.verify_threshold = o.threshold;
  cfg.validate();

  const auto randomness = make_repetitions(stream.universe, o.seed, o.median_reps);
  DistanceEstimator estimator(RationalSimilarity::jaccard(stream.universe), randomness, buckets);
  std::vector<std::vector<LevelSketch>> sketches(stream.sets);
  for (auto& per_set : sketches) {
    for (std::size_t rep = 0; rep < o.median_reps; ++rep) per_set.push_back(estimator.make_sketch(rep));
  }
  net_sets(stream);  // rejects streams whose net counts leave {0, 1}
  for (const auto& u : stream.updates) {
    for (auto& sketch : sketches[u.set]) sketch.update(u.item, u.value);
  }

  LshIndex index(cfg, randomness.front());
  for (SetId id = 0; id < sketches.size(); ++id) index.insert(id, sketches[id].front());
  const auto result = index.candidates();
  auto pairs = result.pairs;
  if (o.threshold) {
    pairs = verify(std::span<const CandidatePair>(result.pairs), estimator,
                   [&](SetId id) { return std::span<const LevelSketch>(sketches[id]); }, *o.threshold);
  }
  Output out(o.out);
  Echo echo("lsh");
  echo.add("seed", o.seed).add("buckets", buckets).add("r1", o.r1).add("r2", o.r2).add("eps", o.eps)
      .add("delta", o.delta).add("p", cfg.p).add("bands", cfg.bands).add("reps", cfg.repetitions)
      .add("median_reps", o.median_reps).add("truncated_buckets", result.truncated_buckets);
  if (o.threshold) echo.add("threshold", *o.threshold);
  echo.write(out.stream());
  write_candidates_csv(out.stream(), pairs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynsim: similarity sketches over insert/delete streams"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "64-bit master seed"); };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output file (default stdout)"); };
  auto add_in = [&](CLI::App* c) { c->add_option("--in", o.in, "stream file")->required(); };
  auto add_mapping = [&](CLI::App* c) {
    c->add_option("--alpha-mapping", o.alpha_mapping, kAlphaHelp)
        ->check(CLI::IsMember({"inclusion", "cardinality"}));
  };

  auto* gen = app.add_subcommand("generate", "write a synthetic stream and its pair manifest");
  add_seed(gen);
  add_out(gen);
  gen->add_option("--manifest", o.manifest, "manifest output file");
  gen->add_option("--rows", o.rows, "base rows before planted partners");
  gen->add_option("--cols", o.cols, "universe size d");
  gen->add_option("--density-lo", o.density_lo, "lowest row density");
  gen->add_option("--density-hi", o.density_hi, "highest row density");
  gen->add_option("--plant-every", o.plant_every, "plant a partner after every k-th row");
  gen->add_flag("--churn", o.churn, "add cancelling insert/delete pairs and shuffle");
  gen->add_flag("--distribution", o.distribution, "plant pairs following a skewed similarity histogram");

  auto* ing = app.add_subcommand("ingest", "replay a stream and print per-set sizes and l0 estimates");
  add_seed(ing);
  add_out(ing);
  add_in(ing);
  ing->add_option("--buckets", o.buckets, "buckets per level (c^2)")->expected(1);

  auto* dev = app.add_subcommand("deviation", "mean absolute deviation of sketch similarities");
  add_seed(dev);
  add_out(dev);
  add_in(dev);
  add_mapping(dev);
  dev->add_option("--manifest", o.manifest, "pair manifest")->required();
  dev->add_option("--buckets", o.buckets, "buckets per level, paired with --alpha");
  dev->add_option("--alpha", o.alpha, "sampling rate, paired with --buckets");
  dev->add_option("--reps", o.reps, "seed repetitions averaged per cell (default 10)");
  dev->add_option("--split", o.split, "similarity separating high from low pairs");
  dev->add_flag("--with-timings", o.with_timings, "append build and query seconds");

  auto* sc = app.add_subcommand("scurve", "empirical vs theoretical candidate probability");
  add_seed(sc);
  add_out(sc);
  add_in(sc);
  add_mapping(sc);
  sc->add_option("--manifest", o.manifest, "pair manifest")->required();
  sc->add_option("--buckets", o.buckets, "buckets per level (default 1024)");
  sc->add_option("--alpha", o.alpha, "sampling rate (default 0.005)");
  sc->add_option("--bands", o.bands, "signatures per key (r)");
  sc->add_option("--reps", o.reps, "independent tables (l)");
  sc->add_option("--trials", o.trials, "independent seeds");
  sc->add_option("--r1", o.r1, "high similarity threshold");

  auto* tim = app.add_subcommand("timing", "all-pairs runtime, sketches vs exact sets");
  add_seed(tim);
  add_out(tim);
  add_in(tim);
  add_mapping(tim);
  tim->add_option("--buckets", o.buckets, "buckets per level (default 256)")->expected(1);
  tim->add_option("--alpha", o.alpha, "sampling rate (default 0.01)")->expected(1);

  auto* lsh = app.add_subcommand("lsh", "candidate pairs from the index, optionally verified");
  add_seed(lsh);
  add_out(lsh);
  add_in(lsh);
  lsh->add_option("--buckets", o.buckets, "buckets per level (default 1024)")->expected(1);
  lsh->add_option("--r1", o.r1, "high similarity threshold");
  lsh->add_option("--r2", o.r2, "low similarity threshold");
  lsh->add_option("--eps", o.eps, "relative accuracy");
  lsh->add_option("--delta", o.delta, "failure probability");
  lsh->add_option("--p", o.p, "sampling parameter (default (eps/5)^2*r1*delta)");
  lsh->add_option("--bands", o.bands, "signatures per key (r)");
  lsh->add_option("--reps", o.reps, "independent tables (l)");
  lsh->add_option("--threshold", o.threshold, "keep pairs with estimated Jaccard distance at most this");
  lsh->add_option("--median-reps", o.median_reps, "odd number of sketch repetitions for verification");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*gen) run_generate(o);
    if (*ing) run_ingest(o);
    if (*dev) run_deviation(o);
    if (*sc) run_scurve(o);
    if (*tim) run_timing(o);
    if (*lsh) run_lsh(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
