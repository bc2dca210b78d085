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

// Numerical dual certificate for the line mechanism.
//
// For a candidate response vector v the dual variable nu solves
//   nu'(r) = delta(r) (min_{a in v} h(|r - a|) - lambda_hat) - eps |nu(r)|,
// with delta(r) = (zeta / 2) e^{-zeta |r|} and nu(v_med) = 0. The dual is
// feasible when nu stays nonnegative far to the right of v_med and
// nonpositive far to the left.

#ifndef MSDP_DUAL_H_
#define MSDP_DUAL_H_

#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "msdp/disutility.h"

namespace msdp {

struct DualProblem {
  double eps;
  double zeta;
  double lambda_hat;
  // Sorted.
  std::vector<double> v;
  DisutilityFn h = DisutilityFn::Identity();

  absl::Status Validate() const;
  // Lower median of v.
  double VMed() const;
};

enum class TailClass {
  kNonnegativeTail,
  kNegativeTail,
  kNonpositiveTail,
  kPositiveTail,
  kUndetermined,
};

std::string_view TailClassName(TailClass c);

struct DualTrace {
  // Ascending in r; r_grid[med_index] == v_med and nu[med_index] == 0.
  std::vector<double> r_grid;
  std::vector<double> nu;
  size_t med_index = 0;
  TailClass right_tail = TailClass::kUndetermined;
  TailClass left_tail = TailClass::kUndetermined;
  // Smallest r beyond which nu >= -tol, when the right tail is nonnegative.
  std::optional<double> nonneg_from;
  // Largest r below which nu <= tol, when the left tail is nonpositive.
  std::optional<double> nonpos_until;
  // nu at the two ends of the integration, which stop early on divergence.
  double nu_right_end = 0.0;
  double nu_left_end = 0.0;
  bool diverged_right = false;
  bool diverged_left = false;
  double max_local_error = 0.0;

  bool IsValid() const {
    return right_tail == TailClass::kNonnegativeTail &&
           left_tail == TailClass::kNonpositiveTail;
  }
};

// max |v| + 25 / min(eps, zeta).
double DefaultRMax(const DualProblem& p);

// Fixed-step RK4 from v_med out to +r_max and -r_max. Steps are cut at the
// kinks of the forcing term and at sign changes of nu, which are located by
// bisection. Every step is checked against two half steps.
absl::StatusOr<DualTrace> SolveDualOde(const DualProblem& p, double r_max,
                                       double step,
                                       size_t max_samples_per_side = 10000);

// (eps - zeta) / (eps + zeta) * ClosedFormCost(eps + zeta, k).
absl::StatusOr<double> DualThreshold(double eps, double zeta, int k);

struct CrossingResult {
  double lambda_star;
  // Largest lambda_hat seen with a valid trace, smallest seen with a
  // negative right tail.
  double valid_below;
  double invalid_above;
  int iterations;
};

// Bisects lambda_hat in [lo, hi] for the switch from valid to negative tails.
absl::StatusOr<CrossingResult> EmpiricalCrossing(DualProblem p, double lo,
                                                 double hi, double tol,
                                                 double step);

}  // namespace msdp

#endif  // MSDP_DUAL_H_
