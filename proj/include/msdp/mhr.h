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

// Quantile placement of results for fixed symmetric log-concave noise.
//
// The noise is |X| ~ f with mean 1 / eps, mirrored about 0. These mechanisms
// are for utility comparison only; half-normal noise is not eps-geographic.

#ifndef MSDP_MHR_H_
#define MSDP_MHR_H_

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "msdp/offset_set.h"

namespace msdp {

// Survival function F(x) = Pr[|X| >= x] of a one-sided noise magnitude.
class SurvivalFn {
 public:
  enum class Tag { kExponential, kHalfNormal, kCustom };

  static SurvivalFn Exponential(double eps);
  static SurvivalFn HalfNormal(double eps);
  // `density` is -F'. The quantile is found by bisection.
  static SurvivalFn Custom(std::string name,
                           std::function<double(double)> survival,
                           std::function<double(double)> density, double mean);

  Tag tag() const { return tag_; }
  const std::string& name() const { return name_; }
  double mean() const { return mean_; }

  double Survival(double x) const;
  double Density(double x) const;
  // Smallest x >= 0 with F(x) = p, for p in (0, 1].
  double Quantile(double p) const;

 private:
  SurvivalFn(Tag tag, std::string name, double scale, double mean,
             std::function<double(double)> survival,
             std::function<double(double)> density)
      : tag_(tag),
        name_(std::move(name)),
        scale_(scale),
        mean_(mean),
        survival_(std::move(survival)),
        density_(std::move(density)) {}

  Tag tag_;
  std::string name_;
  double scale_;
  double mean_;
  std::function<double(double)> survival_;
  std::function<double(double)> density_;
};

// {-a_{K-1}, ..., -a_1, 0, a_1, ..., a_{K-1}} with a_i = F^{-1}(1 - i / K).
absl::StatusOr<OffsetSet> QuantileOffsets(const SurvivalFn& f, int k);

// E min_{v in S} |v - X| for symmetric X with magnitude law f.
absl::StatusOr<double> MhrCost(const SurvivalFn& f, int k);

struct MhrBoundRow {
  int k;
  double phi;
  // (e (1 + log K) + 1) / (K eps_f).
  double bound;
  // phi K eps_f / (1 + log K).
  double ratio;
  bool holds;
};

struct MhrBoundReport {
  std::vector<MhrBoundRow> rows;
  bool all_hold = true;
};

absl::StatusOr<MhrBoundReport> MhrBoundCheck(const SurvivalFn& f,
                                             std::span<const int> ks);

}  // namespace msdp

#endif  // MSDP_MHR_H_
