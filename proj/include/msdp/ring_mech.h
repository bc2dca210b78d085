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

// Mechanisms on the circle of circumference 2 pi with the angular distance.
//
// The local mechanism is piecewise constant with k equally spaced plateaus.
// The geographic mechanism is restricted to k = 2 and a symmetric one-knob
// family of piecewise-exponential densities.

#ifndef MSDP_RING_MECH_H_
#define MSDP_RING_MECH_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "msdp/density.h"
#include "msdp/offset_set.h"

namespace msdp {

struct RingMechanism {
  double eps;
  int k;
  double beta;
  double cell;
  PiecewiseExpDensity density;
  OffsetSet offsets;
};

struct LocalRingResult {
  RingMechanism mechanism;
  double cost;
};

// 1 / (2 (e^{eps/2} + 1)).
double LocalRingBeta(double eps);

// Density that is e^eps times higher within beta * (2 pi / k) of each of the
// k equally spaced points than elsewhere. Exposed so callers can perturb beta.
absl::StatusOr<PiecewiseExpDensity> LocalRingDensity(double eps, int k,
                                                     double beta);

// The optimal local mechanism together with its cost beta * 2 pi / k.
absl::StatusOr<LocalRingResult> LocalRingMechanism(double eps, int k);

// Symmetric density on the ring with rate +eps on [0, t), -eps on [t, pi),
// mirrored about pi. It peaks at t and 2 pi - t. t = 0 gives the
// Laplace-shaped density with its mode at 0 and its minimum at pi.
absl::StatusOr<PiecewiseExpDensity> GeoRingDensityK2(double eps, double t);

// {a, 2 pi - a} with a the conditional median of the density on [0, pi).
absl::StatusOr<OffsetSet> GeoRingOffsetsK2(const PiecewiseExpDensity& density);

// Exact full-ring cost of the family member at t with its median offsets.
absl::StatusOr<double> GeoRingCostK2(double eps, double t);

struct GeoRingResult {
  double t_star;
  double cost;
  PiecewiseExpDensity density;
  OffsetSet offsets;
};

// Minimises the cost over t in [0, pi] with a `t_grid`-point sweep followed
// by golden-section refinement to 1e-6. The sweep is split over `threads`
// workers; the result does not depend on the thread count.
absl::StatusOr<GeoRingResult> GeoRingOptimizeK2(double eps, int t_grid,
                                                int threads = 1);

// The Laplace-shaped member (t = 0) with median offsets.
absl::StatusOr<GeoRingResult> GeoRingLaplaceK2(double eps);
absl::StatusOr<double> GeoRingLaplaceCostK2(double eps);

// "x,rho" CSV with `points` equally spaced samples over [0, circumference).
std::string DensityCsv(const PiecewiseExpDensity& density, int points = 1024);

}  // namespace msdp

#endif  // MSDP_RING_MECH_H_
