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

#include "dynsim/similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dynsim/errors.hpp"

namespace dynsim {

RationalSimilarity::RationalSimilarity(double x, double y, double z, double z_prime,
                                       std::uint64_t d)
    : x_(x), y_(y), z_(z), z_prime_(z_prime), d_(d) {
  for (double v : {x, y, z, z_prime}) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw InputError("similarity coefficients must be finite and non-negative");
    }
  }
  if (z > z_prime) throw InputError("similarity requires z <= z'");
  if (d == 0) throw InputError("universe size must be positive");
}

RationalSimilarity RationalSimilarity::scaled(double factor) const {
  if (!(factor > 0)) throw InputError("scale factor must be positive");
  return {x_ * factor, y_ * factor, z_ * factor, z_prime_ * factor, d_};
}

std::optional<NamedSimilarity> classify(const RationalSimilarity& p) {
  struct Row {
    NamedSimilarity kind;
    std::array<double, 4> coeffs;
  };
  static constexpr std::array<Row, 4> kRows{{
      {NamedSimilarity::kJaccard, {1, 0, 0, 1}},
      {NamedSimilarity::kHamming, {1, 1, 0, 1}},
      {NamedSimilarity::kAnderberg, {1, 0, 0, 2}},
      {NamedSimilarity::kRogersTanimoto, {1, 1, 0, 2}},
  }};
  if (p.x() <= 0) return std::nullopt;
  const std::array<double, 4> normalized{1.0, p.y() / p.x(), p.z() / p.x(), p.z_prime() / p.x()};
  for (const auto& row : kRows) {
    bool match = true;
    for (std::size_t i = 0; i < 4; ++i) {
      match = match && std::abs(normalized[i] - row.coeffs[i]) <= 1e-12;
    }
    if (match) return row.kind;
  }
  return std::nullopt;
}

std::string_view to_string(NamedSimilarity kind) {
  switch (kind) {
    case NamedSimilarity::kJaccard:
      return "jaccard";
    case NamedSimilarity::kHamming:
      return "hamming";
    case NamedSimilarity::kAnderberg:
      return "anderberg";
    case NamedSimilarity::kRogersTanimoto:
      return "rogers-tanimoto";
  }
  return "unknown";
}

RootSimilarity::RootSimilarity(RationalSimilarity base, double alpha)
    : base_(base), alpha_(alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw InputError("root exponent must lie in (0, 1]");
}

ItemSet::ItemSet(std::initializer_list<Item> items) : ItemSet(std::vector<Item>(items)) {}

ItemSet::ItemSet(std::vector<Item> items) : members_(std::move(items)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool ItemSet::contains(Item item) const {
  return std::binary_search(members_.begin(), members_.end(), item);
}

void ItemSet::validate(std::uint64_t d) const {
  if (!members_.empty() && members_.back() >= d) {
    throw InputError("item " + std::to_string(members_.back()) + " outside universe of size " +
                     std::to_string(d));
  }
}

Overlap overlap(const ItemSet& a, const ItemSet& b, std::uint64_t d) {
  a.validate(d);
  b.validate(d);
  const auto lhs = a.members();
  const auto rhs = b.members();
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < lhs.size() && j < rhs.size();) {
    if (lhs[i] < rhs[j]) {
      ++i;
    } else if (rhs[j] < lhs[i]) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  const std::size_t united = lhs.size() + rhs.size() - common;
  return {static_cast<double>(common), static_cast<double>(d - united),
          static_cast<double>(united - common)};
}

double numerator(const RationalSimilarity& p, const Overlap& c) {
  return p.x() * c.intersection + p.y() * c.complement + p.z() * c.symmetric_difference;
}

double denominator(const RationalSimilarity& p, const Overlap& c) {
  return p.x() * c.intersection + p.y() * c.complement + p.z_prime() * c.symmetric_difference;
}

double rational_similarity(const RationalSimilarity& params, const Overlap& cells) {
  const double den = denominator(params, cells);
  if (den <= 0) return 1.0;
  return std::clamp(numerator(params, cells) / den, 0.0, 1.0);
}

double exact_similarity(const RationalSimilarity& params, const ItemSet& a, const ItemSet& b) {
  return rational_similarity(params, overlap(a, b, params.universe_size()));
}

double exact_distance(const RationalSimilarity& params, const ItemSet& a, const ItemSet& b) {
  return 1.0 - exact_similarity(params, a, b);
}

double exact_root_distance(const RootSimilarity& root, const ItemSet& a, const ItemSet& b) {
  return std::pow(exact_distance(root.base(), a, b), root.alpha());
}

bool is_metric(const RationalSimilarity& p) noexcept {
  return p.z_prime() >= std::max({p.x(), p.y(), p.z()});
}

bool is_root_lshable(const RootSimilarity& root) noexcept {
  const auto& p = root.base();
  return p.z_prime() >= (root.alpha() + 1) / 2 * std::max(p.x(), p.y()) && p.z_prime() >= p.z();
}

}  // namespace dynsim
