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

#include "msdp/ring_mech.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <utility>

#include "absl/strings/str_format.h"
#include "msdp/disutility.h"
#include "numerics.h"

namespace msdp {
namespace {

absl::Status ValidateEps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("NonPositiveEpsilon: eps must be positive, got %g", eps));
  }
  return absl::OkStatus();
}

constexpr double kPi = kTwoPi / 2.0;

}  // namespace

double LocalRingBeta(double eps) {
  return 1.0 / (2.0 * (std::exp(0.5 * eps) + 1.0));
}

absl::StatusOr<PiecewiseExpDensity> LocalRingDensity(double eps, int k,
                                                     double beta) {
  if (absl::Status s = ValidateEps(eps); !s.ok()) return s;
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("InvalidK: k must be at least 1, got %d", k));
  }
  if (!(beta > 0.0) || !(beta < 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("beta must lie in (0, 1/2), got %g", beta));
  }
  const double cell = kTwoPi / k;
  const double w = beta * cell;
  std::vector<ExpSegment> segs;
  std::vector<size_t> jumps;
  for (int j = 0; j < k; ++j) {
    const double lo = j * cell;
    const double hi = j + 1 == k ? kTwoPi : (j + 1) * cell;
    segs.push_back({lo, lo + w, eps, 0.0});
    jumps.push_back(segs.size() - 1);
    segs.push_back({lo + w, hi - w, 0.0, 0.0});
    jumps.push_back(segs.size() - 1);
    segs.push_back({hi - w, hi, eps, 0.0});
  }
  return Normalize(Domain::Ring(), std::move(segs), std::move(jumps));
}

absl::StatusOr<LocalRingResult> LocalRingMechanism(double eps, int k) {
  const double beta = LocalRingBeta(eps);
  absl::StatusOr<PiecewiseExpDensity> density = LocalRingDensity(eps, k, beta);
  if (!density.ok()) return density.status();
  const double cell = kTwoPi / k;
  std::vector<double> points(k);
  for (int j = 0; j < k; ++j) points[j] = j * cell;
  absl::StatusOr<OffsetSet> offsets = OffsetSet::Create(std::move(points));
  if (!offsets.ok()) return offsets.status();
  return LocalRingResult{
      RingMechanism{eps, k, beta, cell, *std::move(density),
                    *std::move(offsets)},
      beta * cell};
}

absl::StatusOr<PiecewiseExpDensity> GeoRingDensityK2(double eps, double t) {
  if (absl::Status s = ValidateEps(eps); !s.ok()) return s;
  if (!(t >= 0.0) || !(t <= kPi)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must lie in [0, pi], got %g", t));
  }
  // Log-density normalized to 0 at x = 0 before the final rescale.
  const ExpSegment candidates[] = {
      {0.0, t, 0.0, eps},
      {t, kPi, 2.0 * eps * t, -eps},
      {kPi, kTwoPi - t, 2.0 * eps * t - kTwoPi * eps, eps},
      {kTwoPi - t, kTwoPi, kTwoPi * eps, -eps},
  };
  std::vector<ExpSegment> segs;
  for (const ExpSegment& s : candidates) {
    if (s.hi > s.lo) segs.push_back(s);
  }
  return Normalize(Domain::Ring(), std::move(segs), {});
}

absl::StatusOr<OffsetSet> GeoRingOffsetsK2(const PiecewiseExpDensity& density) {
  if (!density.domain().is_ring()) {
    return absl::InvalidArgumentError("GeoRingOffsetsK2 needs a ring density");
  }
  const double half = density.domain().circumference() / 2.0;
  const double a = density.Quantile(0.5 * density.Cdf(half));
  return OffsetSet::Create({a, 2.0 * half - a});
}

absl::StatusOr<double> GeoRingCostK2(double eps, double t) {
  absl::StatusOr<PiecewiseExpDensity> d = GeoRingDensityK2(eps, t);
  if (!d.ok()) return d.status();
  absl::StatusOr<OffsetSet> a = GeoRingOffsetsK2(*d);
  if (!a.ok()) return a.status();
  return ExpectedMinDisutility(*d, *a, DisutilityFn::Identity());
}

absl::StatusOr<GeoRingResult> GeoRingOptimizeK2(double eps, int t_grid,
                                                int threads) {
  if (absl::Status s = ValidateEps(eps); !s.ok()) return s;
  if (t_grid < 64) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t_grid must be at least 64, got %d", t_grid));
  }
  auto grid_t = [t_grid](int i) {
    return i == t_grid - 1 ? kPi : kPi * i / (t_grid - 1);
  };
  std::vector<double> values(t_grid);
  std::vector<absl::Status> errors(t_grid);
  auto sweep = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      absl::StatusOr<double> c = GeoRingCostK2(eps, grid_t(i));
      if (c.ok()) {
        values[i] = *c;
      } else {
        errors[i] = c.status();
      }
    }
  };
  threads = std::clamp(threads, 1, t_grid);
  if (threads == 1) {
    sweep(0, t_grid);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back(sweep, t_grid * w / threads,
                        t_grid * (w + 1) / threads);
    }
    for (std::thread& th : pool) th.join();
  }
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  const int best =
      static_cast<int>(std::min_element(values.begin(), values.end()) -
                       values.begin());

  auto cost_at = [eps](double t) {
    absl::StatusOr<double> c = GeoRingCostK2(eps, t);
    return c.ok() ? *c : std::numeric_limits<double>::infinity();
  };
  numerics::Minimum m = numerics::GoldenSection(
      cost_at, grid_t(std::max(best - 1, 0)),
      grid_t(std::min(best + 1, t_grid - 1)), 1e-6);
  if (values[best] <= m.value) m = {grid_t(best), values[best]};

  absl::StatusOr<PiecewiseExpDensity> d = GeoRingDensityK2(eps, m.x);
  if (!d.ok()) return d.status();
  absl::StatusOr<OffsetSet> a = GeoRingOffsetsK2(*d);
  if (!a.ok()) return a.status();
  return GeoRingResult{m.x, m.value, *std::move(d), *std::move(a)};
}

absl::StatusOr<GeoRingResult> GeoRingLaplaceK2(double eps) {
  absl::StatusOr<PiecewiseExpDensity> d = GeoRingDensityK2(eps, 0.0);
  if (!d.ok()) return d.status();
  absl::StatusOr<OffsetSet> a = GeoRingOffsetsK2(*d);
  if (!a.ok()) return a.status();
  const double cost = ExpectedMinDisutility(*d, *a, DisutilityFn::Identity());
  return GeoRingResult{0.0, cost, *std::move(d), *std::move(a)};
}

absl::StatusOr<double> GeoRingLaplaceCostK2(double eps) {
  absl::StatusOr<GeoRingResult> r = GeoRingLaplaceK2(eps);
  if (!r.ok()) return r.status();
  return r->cost;
}

std::string DensityCsv(const PiecewiseExpDensity& density, int points) {
  const Domain& dom = density.domain();
  double lo;
  double hi;
  if (dom.is_ring()) {
    lo = 0.0;
    hi = dom.circumference();
  } else {
    lo = density.Quantile(0.001);
    hi = density.Quantile(0.999);
  }
  std::string out = "x,rho\n";
  for (int i = 0; i < points; ++i) {
    const double x = dom.is_ring() ? lo + (hi - lo) * i / points
                                   : lo + (hi - lo) * i / (points - 1);
    absl::StrAppendFormat(&out, "%.17g,%.17g\n", x, density.Value(x));
  }
  return out;
}

}  // namespace msdp
