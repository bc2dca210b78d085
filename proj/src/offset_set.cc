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

#include "msdp/offset_set.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace msdp {

absl::StatusOr<OffsetSet> OffsetSet::Create(std::vector<double> offsets) {
  if (offsets.empty()) {
    return absl::InvalidArgumentError("EmptyOffsets: offset set is empty");
  }
  for (size_t i = 0; i < offsets.size(); ++i) {
    if (!std::isfinite(offsets[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Offset %d is not finite", i));
    }
    if (i > 0 && !(offsets[i] > offsets[i - 1])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "Offsets must be strictly increasing; offset %d = %g follows %g", i,
          offsets[i], offsets[i - 1]));
    }
  }
  return OffsetSet(std::move(offsets));
}

absl::StatusOr<OffsetSet> OffsetSet::FromUnsorted(std::vector<double> offsets) {
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  return Create(std::move(offsets));
}

}  // namespace msdp
