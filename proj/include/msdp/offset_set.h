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

#ifndef MSDP_OFFSET_SET_H_
#define MSDP_OFFSET_SET_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace msdp {

// The k result offsets a server adds to a received signal. Strictly
// increasing and finite.
class OffsetSet {
 public:
  static absl::StatusOr<OffsetSet> Create(std::vector<double> offsets);
  // Sorts and merges duplicates before validating.
  static absl::StatusOr<OffsetSet> FromUnsorted(std::vector<double> offsets);

  std::span<const double> values() const { return offsets_; }
  size_t size() const { return offsets_.size(); }
  double operator[](size_t i) const { return offsets_[i]; }
  double front() const { return offsets_.front(); }
  double back() const { return offsets_.back(); }

  friend bool operator==(const OffsetSet&, const OffsetSet&) = default;

 private:
  explicit OffsetSet(std::vector<double> offsets)
      : offsets_(std::move(offsets)) {}

  std::vector<double> offsets_;
};

}  // namespace msdp

#endif  // MSDP_OFFSET_SET_H_
