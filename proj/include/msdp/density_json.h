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

#ifndef MSDP_DENSITY_JSON_H_
#define MSDP_DENSITY_JSON_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "msdp/density.h"

namespace msdp {

// {"domain": {"kind": "line"} | {"kind": "ring", "circumference": C},
//  "segments": [{"lo", "hi", "log_coeff", "rate"}, ...],
//  "flags": {"jumps": [breakpoint indices]}}
// Infinite bounds are written as the strings "-inf" / "+inf"; numbers use the
// shortest decimal form that round-trips.
std::string DensityToJson(const PiecewiseExpDensity& density);
absl::StatusOr<PiecewiseExpDensity> DensityFromJson(std::string_view text);

}  // namespace msdp

#endif  // MSDP_DENSITY_JSON_H_
