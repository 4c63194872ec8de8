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

#include "dynsim/bench/stream_file.hpp"

#include <charconv>
#include <string>
#include <string_view>
#include <unordered_map>

#include "dynsim/errors.hpp"

namespace dynsim::bench {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(start, end - start));
    pos = end;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const char* what) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

StreamFile read_stream(std::istream& in) {
  StreamFile stream;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto parts = fields(line);
    if (!have_header) {
      if (parts.size() != 2) throw ParseError(line_no, "expected header 'n d'");
      stream.sets = parse_number<std::uint64_t>(parts[0], line_no, "set count");
      stream.universe = parse_number<std::uint64_t>(parts[1], line_no, "universe size");
      if (stream.universe == 0) throw ParseError(line_no, "universe size must be positive");
      if (stream.sets > (std::uint64_t{1} << 32) || stream.universe > (std::uint64_t{1} << 32)) {
        throw ParseError(line_no, "set count and universe size must not exceed 2^32");
      }
      have_header = true;
      continue;
    }
    if (parts.size() != 3) throw ParseError(line_no, "expected update 'j i v'");
    const auto set = parse_number<std::uint64_t>(parts[0], line_no, "set index");
    const auto item = parse_number<std::uint64_t>(parts[1], line_no, "item");
    const auto value = parse_number<int>(parts[2], line_no, "update value");
    if (set >= stream.sets) throw ParseError(line_no, "set index out of range");
    if (item >= stream.universe) throw ParseError(line_no, "item out of range");
    if (value != 1 && value != -1) throw ParseError(line_no, "update value must be +1 or -1");
    stream.updates.push_back({static_cast<std::uint32_t>(set), static_cast<Item>(item), value});
  }
  if (!have_header) throw ParseError(line_no, "missing header 'n d'");
  return stream;
}

void write_stream(std::ostream& out, const StreamFile& stream) {
  out << stream.sets << ' ' << stream.universe << '\n';
  for (const auto& u : stream.updates) out << u.set << ' ' << u.item << ' ' << u.value << '\n';
}

std::vector<ItemSet> net_sets(const StreamFile& stream) {
  std::vector<std::unordered_map<Item, int>> counts(stream.sets);
  for (const auto& u : stream.updates) {
    if (u.set >= stream.sets || u.item >= stream.universe) {
      throw DataError("update outside the declared dimensions");
    }
    counts[u.set][u.item] += u.value;
  }
  std::vector<ItemSet> sets;
  sets.reserve(stream.sets);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    std::vector<Item> members;
    for (const auto& [item, net] : counts[j]) {
      if (net != 0 && net != 1) {
        throw DataError("set " + std::to_string(j) + " item " + std::to_string(item) +
                        " has net count " + std::to_string(net));
      }
      if (net == 1) members.push_back(item);
    }
    sets.emplace_back(std::move(members));
  }
  return sets;
}

Corpus ingest(const StreamFile& stream, std::shared_ptr<const SketchRandomness> randomness,
              std::uint64_t buckets) {
  return ingest(stream, net_sets(stream), std::move(randomness), buckets);
}

Corpus ingest(const StreamFile& stream, std::vector<ItemSet> sets,
              std::shared_ptr<const SketchRandomness> randomness, std::uint64_t buckets) {
  if (!randomness || randomness->universe_size() != stream.universe) {
    throw ConfigError("randomness universe does not match the stream");
  }
  Corpus corpus;
  corpus.universe = stream.universe;
  corpus.sets = std::move(sets);
  corpus.sketches.assign(stream.sets, LevelSketch(randomness, buckets));
  for (const auto& u : stream.updates) corpus.sketches[u.set].update(u.item, u.value);
  return corpus;
}

}  // namespace dynsim::bench
