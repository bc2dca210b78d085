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

#ifndef MSDP_DISUTILITY_H_
#define MSDP_DISUTILITY_H_

#include <functional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace msdp {

// Monotone cost of a distance, h(0) = 0.
//
// Identity gets an exact integration path everywhere in the library; the
// other tags go through quadrature. Only a sampled monotonicity check is done
// for custom functions, the log-Lipschitz growth condition is not enforced.
class DisutilityFn {
 public:
  enum class Tag { kIdentity, kSqrt, kSquare, kCustom };

  static DisutilityFn Identity();
  static DisutilityFn Sqrt();
  static DisutilityFn Square();
  // Fails unless h(0) = 0 and h is strictly increasing on (0, 100] sampled
  // with step 0.01.
  static absl::StatusOr<DisutilityFn> Custom(std::string name,
                                             std::function<double(double)> h);
  // Parses "identity", "sqrt" or "square".
  static absl::StatusOr<DisutilityFn> FromName(std::string_view name);

  double operator()(double distance) const { return eval_(distance); }
  Tag tag() const { return tag_; }
  bool is_identity() const { return tag_ == Tag::kIdentity; }
  const std::string& name() const { return name_; }

 private:
  DisutilityFn(Tag tag, std::string name, std::function<double(double)> eval)
      : tag_(tag), name_(std::move(name)), eval_(std::move(eval)) {}

  Tag tag_;
  std::string name_;
  std::function<double(double)> eval_;
};

}  // namespace msdp

#endif  // MSDP_DISUTILITY_H_
