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

// Binary sketch layout, all integers little-endian:
//
//   u64  payload length in bytes (everything after this field)
//   u8   format version (1)
//   u64  universe size d
//   u64  bucket count c²
//   u32  level count
//   i64  cardinality
//   i64  counters, levels × c², row-major
//
// Counters are always stored as 64-bit regardless of the in-memory scalar.

#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>

#include "dynsim/errors.hpp"
#include "dynsim/level_sketch.hpp"

namespace dynsim {

inline constexpr std::uint8_t kSketchFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  auto bits = static_cast<std::make_unsigned_t<T>>(value);
  for (auto& b : bytes) {
    b = static_cast<char>(bits & 0xFFU);
    bits = static_cast<decltype(bits)>(bits >> 8);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ParseError(0, "truncated sketch record");
  std::make_unsigned_t<T> bits = 0;
  for (std::size_t i = bytes.size(); i-- > 0;) {
    bits = static_cast<decltype(bits)>((bits << 8) | bytes[i]);
  }
  return static_cast<T>(bits);
}

}  // namespace detail

template <typename Counter>
void write_sketch(std::ostream& out, const BasicLevelSketch<Counter>& sketch) {
  const auto cells = static_cast<std::uint64_t>(sketch.counters().size());
  const std::uint64_t payload = 1 + 8 + 8 + 4 + 8 + 8 * cells;
  detail::put_le<std::uint64_t>(out, payload);
  detail::put_le<std::uint8_t>(out, kSketchFormatVersion);
  detail::put_le<std::uint64_t>(out, sketch.universe_size());
  detail::put_le<std::uint64_t>(out, sketch.bucket_count());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sketch.levels()));
  detail::put_le<std::int64_t>(out, sketch.cardinality());
  const Counter* data = sketch.counters().data();
  for (std::uint64_t i = 0; i < cells; ++i) detail::put_le<std::int64_t>(out, data[i]);
}

/// Reads one record and binds it to `randomness`, which must describe the
/// same universe the sketch was built over.
template <typename Counter = std::int64_t>
BasicLevelSketch<Counter> read_sketch(std::istream& in,
                                      std::shared_ptr<const SketchRandomness> randomness) {
  const auto payload = detail::get_le<std::uint64_t>(in);
  const auto version = detail::get_le<std::uint8_t>(in);
  if (version != kSketchFormatVersion) throw ParseError(0, "unsupported sketch format version");
  const auto d = detail::get_le<std::uint64_t>(in);
  const auto buckets = detail::get_le<std::uint64_t>(in);
  const auto levels = detail::get_le<std::uint32_t>(in);
  if (!randomness || d != randomness->universe_size() ||
      levels != static_cast<std::uint32_t>(randomness->levels())) {
    throw ConfigError("stored sketch does not match the supplied randomness");
  }
  if (buckets == 0 || payload != 1 + 8 + 8 + 4 + 8 + 8 * levels * buckets) {
    throw ParseError(0, "sketch record length does not match its dimensions");
  }
  const auto cardinality = detail::get_le<std::int64_t>(in);
  using Matrix = typename BasicLevelSketch<Counter>::Matrix;
  Matrix counters(static_cast<Eigen::Index>(levels), static_cast<Eigen::Index>(buckets));
  Counter* data = counters.data();
  auto narrow = [](std::int64_t v) {
    if (v < std::numeric_limits<Counter>::min() || v > std::numeric_limits<Counter>::max()) {
      throw CounterOverflow("stored counter does not fit the sketch scalar");
    }
    return static_cast<Counter>(v);
  };
  for (Eigen::Index i = 0; i < counters.size(); ++i) data[i] = narrow(detail::get_le<std::int64_t>(in));
  return BasicLevelSketch<Counter>::from_parts(std::move(randomness), narrow(cardinality),
                                               std::move(counters));
}

}  // namespace dynsim
