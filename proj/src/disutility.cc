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

#include "msdp/disutility.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"

namespace msdp {

DisutilityFn DisutilityFn::Identity() {
  return DisutilityFn(Tag::kIdentity, "identity", [](double d) { return d; });
}

DisutilityFn DisutilityFn::Sqrt() {
  return DisutilityFn(Tag::kSqrt, "sqrt", [](double d) { return std::sqrt(d); });
}

DisutilityFn DisutilityFn::Square() {
  return DisutilityFn(Tag::kSquare, "square", [](double d) { return d * d; });
}

absl::StatusOr<DisutilityFn> DisutilityFn::Custom(
    std::string name, std::function<double(double)> h) {
  if (!h) return absl::InvalidArgumentError("Disutility callable is empty");
  if (h(0.0) != 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Disutility must satisfy h(0) = 0, got %g", h(0.0)));
  }
  double prev = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double d = 0.01 * i;
    const double v = h(d);
    if (!std::isfinite(v) || !(v > prev)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "Disutility must be strictly increasing; fails at d = %g", d));
    }
    prev = v;
  }
  return DisutilityFn(Tag::kCustom, std::move(name), std::move(h));
}

absl::StatusOr<DisutilityFn> DisutilityFn::FromName(std::string_view name) {
  if (name == "identity") return Identity();
  if (name == "sqrt") return Sqrt();
  if (name == "square") return Square();
  return absl::InvalidArgumentError(
      absl::StrFormat("Unknown disutility '%s'", std::string(name)));
}

}  // namespace msdp
