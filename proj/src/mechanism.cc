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

#include "msdp/mechanism.h"

#include <utility>

#include "absl/strings/str_format.h"
#include "msdp/line_mech.h"
#include "msdp/ring_mech.h"

namespace msdp {

absl::Status MechanismConfig::Validate() const {
  if (offsets.size() != static_cast<size_t>(k)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected %d offsets, got %d", k, offsets.size()));
  }
  if (domain().is_ring()) {
    for (double a : offsets.values()) {
      if (a < 0.0 || a >= domain().circumference()) {
        return absl::InvalidArgumentError(
            absl::StrFormat("ring offset %g outside [0, C)", a));
      }
    }
  }
  const PrivacyReport report = CheckPrivacy(noise, eps, metric);
  if (!report.satisfied) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "PrivacyViolated: worst log ratio excess %g near x = %g",
        report.worst_ratio_log, report.witness_x));
  }
  return absl::OkStatus();
}

absl::StatusOr<MechanismConfig> MakeLineMechanism(double eps, int k,
                                                  const DisutilityFn& h,
                                                  LineMethod method) {
  absl::StatusOr<PiecewiseExpDensity> noise = LaplaceDensity(eps);
  if (!noise.ok()) return noise.status();
  absl::StatusOr<OffsetSet> offsets;
  if (method == LineMethod::kClosed) {
    offsets = OptimalOffsetsClosed(eps, k);
  } else {
    absl::StatusOr<RecurrenceResult> r = OptimalOffsetsRecurrence(eps, k, h);
    if (!r.ok()) return r.status();
    offsets = std::move(r->offsets);
  }
  if (!offsets.ok()) return offsets.status();
  return MechanismConfig{"line",
                         eps,
                         k,
                         PrivacyMetric::kGeographic,
                         *std::move(noise),
                         *std::move(offsets),
                         h};
}

absl::StatusOr<MechanismConfig> MakeRingLocalMechanism(double eps, int k) {
  absl::StatusOr<LocalRingResult> r = LocalRingMechanism(eps, k);
  if (!r.ok()) return r.status();
  return MechanismConfig{"ring-local",
                         eps,
                         k,
                         PrivacyMetric::kLocal,
                         std::move(r->mechanism.density),
                         std::move(r->mechanism.offsets),
                         DisutilityFn::Identity()};
}

absl::StatusOr<MechanismConfig> MakeRingGeoMechanism(double eps, int t_grid,
                                                     int threads) {
  absl::StatusOr<GeoRingResult> r = GeoRingOptimizeK2(eps, t_grid, threads);
  if (!r.ok()) return r.status();
  return MechanismConfig{"ring-geo",
                         eps,
                         2,
                         PrivacyMetric::kGeographic,
                         std::move(r->density),
                         std::move(r->offsets),
                         DisutilityFn::Identity()};
}

double CertifiedCost(const MechanismConfig& mech) {
  return ExpectedMinDisutility(mech.noise, mech.offsets, mech.h);
}

}  // namespace msdp
