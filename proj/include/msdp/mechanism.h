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

// A complete two-stage mechanism: the noise the client adds and the offsets
// the server answers with.

#ifndef MSDP_MECHANISM_H_
#define MSDP_MECHANISM_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "msdp/density.h"
#include "msdp/disutility.h"
#include "msdp/offset_set.h"

namespace msdp {

struct MechanismConfig {
  std::string label;
  double eps;
  int k;
  PrivacyMetric metric;
  PiecewiseExpDensity noise;
  OffsetSet offsets;
  DisutilityFn h;

  const Domain& domain() const { return noise.domain(); }
  // Checks that the offsets fit the domain and the noise meets the claimed
  // guarantee.
  absl::Status Validate() const;
};

enum class LineMethod { kClosed, kRecurrence };

absl::StatusOr<MechanismConfig> MakeLineMechanism(
    double eps, int k, const DisutilityFn& h = DisutilityFn::Identity(),
    LineMethod method = LineMethod::kClosed);
absl::StatusOr<MechanismConfig> MakeRingLocalMechanism(double eps, int k);
absl::StatusOr<MechanismConfig> MakeRingGeoMechanism(double eps,
                                                     int t_grid = 512,
                                                     int threads = 1);

// Exact expected disutility E min_a h(d(0, X + a)).
double CertifiedCost(const MechanismConfig& mech);

}  // namespace msdp

#endif  // MSDP_MECHANISM_H_
