//
// Copyright 2026 The msdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef MSDP_RNG_H_
#define MSDP_RNG_H_

#include <cstdint>
#include <random>

namespace msdp {

// Derives the seed of child stream `index` from `parent_seed`. Every parallel
// worker (Monte Carlo batch, search restart, simulated session) draws from its
// own child stream, so results do not depend on the number of threads.
uint64_t ChildSeed(uint64_t parent_seed, uint64_t index);

// Deterministic 64-bit generator. Uniform doubles are built from the top 53
// bits directly rather than through std::uniform_real_distribution, whose
// output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace msdp

#endif  // MSDP_RNG_H_
