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

#include "dynsim/l0_distance.hpp"

namespace dynsim {

std::vector<std::shared_ptr<const SketchRandomness>> make_repetitions(std::uint64_t d,
                                                                      std::uint64_t master_seed,
                                                                      std::size_t count) {
  std::vector<std::shared_ptr<const SketchRandomness>> out;
  out.reserve(count);
  for (std::size_t rep = 0; rep < count; ++rep) {
    out.push_back(std::make_shared<const SketchRandomness>(d, splitmix64(master_seed + rep)));
  }
  return out;
}

}  // namespace dynsim
