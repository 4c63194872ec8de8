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

#include "dynsim/level_sketch.hpp"

#include <cmath>

namespace dynsim {

namespace {

bool in_unit_interval(double v) { return v > 0 && v < 1; }

int clamped_floor_log2(double argument, int max_level) {
  if (!(argument >= 1)) return 0;
  return std::min(static_cast<int>(std::floor(std::log2(argument))), max_level);
}

void check_accuracy_args(double epsilon, double delta, double r) {
  if (!in_unit_interval(epsilon) || !in_unit_interval(delta) || !in_unit_interval(r)) {
    throw InputError("epsilon, delta and r must lie in (0, 1)");
  }
}

}  // namespace

void SketchConfig::validate() const {
  if (buckets == 0) throw InputError("bucket count must be positive");
  if (d == 0) throw InputError("universe size must be positive");
  check_accuracy_args(epsilon, delta, r1);
}

double sampling_parameter(double epsilon, double delta, double r1) {
  check_accuracy_args(epsilon, delta, r1);
  return (epsilon / 5) * (epsilon / 5) * r1 * delta;
}

double theoretical_bucket_count(const SketchConfig& cfg) {
  cfg.validate();
  const double p = sampling_parameter(cfg.epsilon, cfg.delta, cfg.r1);
  const double sampled = 1 / (p * cfg.r1) + 1 / (p * cfg.r1 * cfg.r1);
  return sampled * sampled / std::sqrt(cfg.delta);
}

int sample_level(const RationalSimilarity& params, double epsilon, double delta, double r,
                 double size_hint, int max_level) {
  check_accuracy_args(epsilon, delta, r);
  if (!(size_hint >= 1)) throw InputError("size hint must be at least 1");
  const double base = epsilon * epsilon * delta * r * size_hint;
  const auto kind = classify(params);
  if (!kind) return general_sample_level(params, epsilon, delta, r, size_hint, max_level);
  switch (*kind) {
    case NamedSimilarity::kJaccard:
      return clamped_floor_log2(base, max_level);
    case NamedSimilarity::kHamming:
      return clamped_floor_log2(base / 2, max_level);
    case NamedSimilarity::kAnderberg:
    case NamedSimilarity::kRogersTanimoto:
      return clamped_floor_log2(base / 3, max_level);
  }
  return 0;
}

int general_sample_level(const RationalSimilarity& p, double epsilon, double delta, double r,
                         double numerator_value, int max_level) {
  check_accuracy_args(epsilon, delta, r);
  const double spread = std::max({p.x() + p.y(), p.z_prime() + p.y(), p.z() + p.y()});
  if (spread <= 0) return 0;
  const double shrunk = epsilon / 5;
  return clamped_floor_log2(shrunk * shrunk * delta * r * numerator_value / spread, max_level);
}

double occupancy_correction(std::uint64_t nonzero, std::uint64_t buckets) {
  if (nonzero == 0) return 0;
  if (buckets <= 1) return static_cast<double>(nonzero);
  // A full row has no finite inverse; read it as one bucket short of full.
  const double occupied = nonzero >= buckets ? static_cast<double>(buckets) - 0.5
                                             : static_cast<double>(nonzero);
  const double m = static_cast<double>(buckets);
  return std::log1p(-occupied / m) / std::log1p(-1 / m);
}

}  // namespace dynsim
