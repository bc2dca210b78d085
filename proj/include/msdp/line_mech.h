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

// Geographic differential privacy on the real line: Laplace noise together
// with the server offsets that minimise the expected distance from the user
// to the closest of k returned results.
//
// Costs are in the normalization rho(x) = (eps / 2) exp(-eps |x|), so a
// single result costs E|X| = 1 / eps.

#ifndef MSDP_LINE_MECH_H_
#define MSDP_LINE_MECH_H_

#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "msdp/density.h"
#include "msdp/disutility.h"
#include "msdp/offset_set.h"

namespace msdp {

absl::StatusOr<PiecewiseExpDensity> LaplaceDensity(double eps);

// Odd k = 2t + 1: {0, +-2 log((t + 1) / j) / eps : j = 1..t}.
// Even k = 2t: innermost pair at +-log(1 + 2 / k) / eps, then outward gaps
// 2 log(1 + 1 / i) / eps for i = t - 1, ..., 1.
absl::StatusOr<OffsetSet> OptimalOffsetsClosed(double eps, int k);

// 2 / (eps (k + 1)) for odd k, log(1 + 2 / k) / eps for even k.
absl::StatusOr<double> ClosedFormCost(double eps, int k);

struct RecurrenceResult {
  OffsetSet offsets;
  double cost;
  // D_1, ..., D_b in units of 1 / eps: the expected cost of a one-sided
  // exponential user served by b results starting at the origin.
  std::vector<double> conditional_costs;
  // gaps[b - 1] is the optimal spacing that turns D_b into D_{b+1}, in units
  // of 1 / eps.
  std::vector<double> gaps;
  // Even k only: the optimal innermost half-gap, in units of 1 / eps.
  double inner_half_gap = 0.0;
};

// Builds the optimal offsets for an arbitrary disutility by the
// memorylessness recurrence
//   D_{b+1} = min_s  int_0^s min{h(t), h(s - t)} e^{-t} dt + e^{-s} D_b,
// with each s found by a 200-point log grid on (0, 50] refined by golden
// section. Even k adds a symmetric innermost pair whose half-gap s0 minimises
//   int_0^{s0} h(s0 - x) e^{-x} dx + e^{-s0} D_{k/2}.
absl::StatusOr<RecurrenceResult> OptimalOffsetsRecurrence(
    double eps, int k, const DisutilityFn& h);

struct MedianReport {
  // Cell boundaries y_0 .. y_{k-2} between consecutive offsets.
  std::vector<double> midpoints;
  // Mass between the left cell boundary and x_i minus mass between x_i and
  // the right cell boundary.
  std::vector<double> residuals;

  double MaxAbsResidual() const;
};

// First-order optimality diagnostic: each offset must split its own cell's
// mass evenly. Line densities only.
MedianReport MedianCondition(const PiecewiseExpDensity& density,
                             const OffsetSet& offsets);

// A g-geographic guarantee with convex g, g(0) = 0 is met by the Laplace
// mechanism at eps = g'(0).
absl::StatusOr<double> EffectiveEpsilon(double g_prime_at_zero);

// One-sided Richardson estimate of g'(0).
double DerivativeAtZero(const std::function<double(double)>& g);

}  // namespace msdp

#endif  // MSDP_LINE_MECH_H_
