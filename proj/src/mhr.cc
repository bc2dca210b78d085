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

#include "msdp/mhr.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "absl/strings/str_format.h"
#include "boost/math/special_functions/erf.hpp"
#include "numerics.h"

namespace msdp {
namespace {

double BisectQuantile(const std::function<double(double)>& survival,
                      double mean, double p) {
  if (p >= 1.0) return 0.0;
  double lo = 0.0;
  double hi = mean;
  while (survival(hi) > p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (survival(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SurvivalFn SurvivalFn::Exponential(double eps) {
  return SurvivalFn(
      Tag::kExponential, "exp", 1.0 / eps, 1.0 / eps,
      [eps](double x) { return std::exp(-eps * x); },
      [eps](double x) { return eps * std::exp(-eps * x); });
}

SurvivalFn SurvivalFn::HalfNormal(double eps) {
  const double sigma = std::sqrt(std::numbers::pi / 2.0) / eps;
  const double root2s = std::numbers::sqrt2 * sigma;
  const double peak = 2.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  return SurvivalFn(
      Tag::kHalfNormal, "halfnormal", sigma, 1.0 / eps,
      [root2s](double x) { return std::erfc(x / root2s); },
      [peak, root2s](double x) {
        const double z = x / root2s;
        return peak * std::exp(-z * z);
      });
}

SurvivalFn SurvivalFn::Custom(std::string name,
                              std::function<double(double)> survival,
                              std::function<double(double)> density,
                              double mean) {
  return SurvivalFn(Tag::kCustom, std::move(name), mean, mean,
                    std::move(survival), std::move(density));
}

double SurvivalFn::Survival(double x) const { return survival_(x); }

double SurvivalFn::Density(double x) const { return density_(x); }

double SurvivalFn::Quantile(double p) const {
  if (p >= 1.0) return 0.0;
  switch (tag_) {
    case Tag::kExponential:
      return -std::log(p) * scale_;
    case Tag::kHalfNormal:
      return std::numbers::sqrt2 * scale_ * boost::math::erfc_inv(p);
    case Tag::kCustom:
      break;
  }
  return BisectQuantile(survival_, mean_, p);
}

absl::StatusOr<OffsetSet> QuantileOffsets(const SurvivalFn& f, int k) {
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("InvalidK: K must be at least 1, got %d", k));
  }
  std::vector<double> a(k);
  for (int i = 1; i < k; ++i) a[i] = f.Quantile(1.0 - static_cast<double>(i) / k);
  std::vector<double> all;
  for (int i = k - 1; i >= 1; --i) all.push_back(-a[i]);
  all.push_back(0.0);
  for (int i = 1; i < k; ++i) all.push_back(a[i]);
  return OffsetSet::Create(std::move(all));
}

absl::StatusOr<double> MhrCost(const SurvivalFn& f, int k) {
  absl::StatusOr<OffsetSet> s = QuantileOffsets(f, k);
  if (!s.ok()) return s.status();
  // By symmetry only the magnitude matters: 0 = a_0 < a_1 < ... < a_{K-1}.
  std::vector<double> a(s->values().begin() + (k - 1), s->values().end());
  const double tol = 1e-10 / (2 * k);
  numerics::CompensatedSum phi;
  for (int i = 0; i + 1 < k; ++i) {
    const double lo = a[i];
    const double hi = a[i + 1];
    const double mid = 0.5 * (lo + hi);
    phi.Add(numerics::AdaptiveSimpson(
        [&f, lo](double x) { return (x - lo) * f.Density(x); }, lo, mid, tol));
    phi.Add(numerics::AdaptiveSimpson(
        [&f, hi](double x) { return (hi - x) * f.Density(x); }, mid, hi, tol));
  }
  const double last = a.back();
  const double end = last + 50.0 * f.mean();
  // Split the tail so the adaptive rule sees its mass near the start.
  double lo = last;
  double width = f.mean() / 8.0;
  while (lo < end) {
    const double hi = std::min(end, lo + width);
    phi.Add(numerics::AdaptiveSimpson(
        [&f, last](double x) { return (x - last) * f.Density(x); }, lo, hi,
        tol));
    lo = hi;
    width *= 2.0;
  }
  return phi.Total();
}

absl::StatusOr<MhrBoundReport> MhrBoundCheck(const SurvivalFn& f,
                                             std::span<const int> ks) {
  MhrBoundReport report;
  const double eps_f = 1.0 / f.mean();
  for (int k : ks) {
    absl::StatusOr<double> phi = MhrCost(f, k);
    if (!phi.ok()) return phi.status();
    const double log_k = std::log(static_cast<double>(k));
    MhrBoundRow row;
    row.k = k;
    row.phi = *phi;
    row.bound = (std::numbers::e * (1.0 + log_k) + 1.0) / (k * eps_f);
    row.ratio = *phi * k * eps_f / (1.0 + log_k);
    row.holds = *phi <= row.bound;
    report.all_hold = report.all_hold && row.holds;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace msdp
