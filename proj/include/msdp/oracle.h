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

// Independent numerical checks: a brute-force offset search on the exact
// cost and a seeded Monte Carlo cost estimate.

#ifndef MSDP_ORACLE_H_
#define MSDP_ORACLE_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "msdp/density.h"
#include "msdp/disutility.h"
#include "msdp/mechanism.h"
#include "msdp/offset_set.h"

namespace msdp {

struct SearchBudget {
  // Grid points in each coordinate line search before golden refinement.
  int grid_points = 32;
  // Maximum sweeps over all coordinates per start.
  int refine_iters = 200;
  int restarts = 8;
  uint64_t seed = 1;

  absl::Status Validate() const;
};

struct BruteForceOptions {
  // Used as the first start when set; every other start is drawn at random
  // from the noise density (uniform on the ring).
  std::optional<OffsetSet> candidate;
  int threads = 1;
};

struct BruteForceResult {
  OffsetSet offsets;
  double cost;
  int best_restart;
  // Set when no start improved on its own initial cost.
  bool budget_exhausted;
};

// Cyclic coordinate descent with a grid-plus-golden line search on the exact
// expected cost, from several starts. Deterministic given budget.seed.
absl::StatusOr<BruteForceResult> BruteForceOffsets(
    const PiecewiseExpDensity& density, int k, const DisutilityFn& h,
    const SearchBudget& budget, const BruteForceOptions& options = {});

struct CostEstimate {
  double mean;
  // Sample standard deviation over sqrt(n).
  double std_error;
  int64_t n;
};

// Monte Carlo estimate of E min_a h(d(u, u + X + a)). Draws come in fixed
// batches with their own child seeds, so the estimate depends only on
// (n, seed).
absl::StatusOr<CostEstimate> McCost(const MechanismConfig& mech, int64_t n,
                                    uint64_t seed, double user_value = 0.0,
                                    int threads = 1);

}  // namespace msdp

#endif  // MSDP_ORACLE_H_
