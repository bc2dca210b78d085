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

#include "msdp/line_mech.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_format.h"
#include "numerics.h"

namespace msdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxStep = 50.0;
constexpr double kMinStep = 1e-6;
constexpr int kStepGridPoints = 200;
constexpr double kStepTolerance = 1e-10;

absl::Status ValidateEpsK(double eps, int k) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("NonPositiveEpsilon: eps must be positive, got %g", eps));
  }
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("InvalidK: k must be at least 1, got %d", k));
  }
  return absl::OkStatus();
}

// int_0^inf h(t) e^{-t} dt.
double BaseConditionalCost(const DisutilityFn& h) {
  if (h.is_identity()) return 1.0;
  return numerics::AdaptiveSimpson(
      [&h](double t) { return h(t) * std::exp(-t); }, 0.0, 60.0, 1e-12, 40);
}

// Cost of spacing the next result s beyond the current one when the tail
// from there on costs `tail`.
double OddStepCost(const DisutilityFn& h, double s, double tail) {
  const double es = std::exp(-s);
  if (h.is_identity()) {
    const double half = std::exp(-0.5 * s);
    return (1.0 - half) * (1.0 - half) + es * tail;
  }
  const double near = numerics::AdaptiveSimpson(
      [&h](double t) { return h(t) * std::exp(-t); }, 0.0, 0.5 * s, 1e-12, 40);
  const double far = numerics::AdaptiveSimpson(
      [&h, s](double t) { return h(s - t) * std::exp(-t); }, 0.5 * s, s, 1e-12,
      40);
  return near + far + es * tail;
}

// Cost of a user on [0, inf) served by the innermost result at s0, with the
// outer results costing `tail` beyond it.
double EvenBaseCost(const DisutilityFn& h, double s0, double tail) {
  const double es = std::exp(-s0);
  if (h.is_identity()) return s0 - 1.0 + es + es * tail;
  const double inner = numerics::AdaptiveSimpson(
      [&h, s0](double x) { return h(s0 - x) * std::exp(-x); }, 0.0, s0, 1e-12,
      40);
  return inner + es * tail;
}

// Minimises f over (0, kMaxStep] on a log-spaced grid refined by golden
// section.
absl::StatusOr<numerics::Minimum> MinimizeStep(
    const std::function<double(double)>& f) {
  const double log_lo = std::log(kMinStep);
  const double log_hi = std::log(kMaxStep);
  std::vector<double> grid(kStepGridPoints);
  for (int i = 0; i < kStepGridPoints; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (kStepGridPoints - 1));
  }
  grid.back() = kMaxStep;
  int best = 0;
  double best_value = f(grid[0]);
  for (int i = 1; i < kStepGridPoints; ++i) {
    const double v = f(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best == kStepGridPoints - 1) {
    return absl::InternalError(absl::StrFormat(
        "NonConvergent: step minimum not bracketed (best at s = %g)",
        grid[best]));
  }
  numerics::Minimum m =
      numerics::GoldenSection(f, grid[best - 1], grid[best + 1], kStepTolerance);
  if (best_value < m.value) m = {grid[best], best_value};
  // Function values only resolve a smooth minimum to about sqrt(machine
  // epsilon); Newton steps on difference quotients recover the rest.
  for (int iter = 0; iter < 3; ++iter) {
    const double h1 = 1e-5 * std::max(1.0, m.x);
    const double h2 = 1e-3 * m.x;
    const double d1 = (f(m.x + h1) - f(m.x - h1)) / (2.0 * h1);
    const double d2 = (f(m.x + h2) - 2.0 * m.value + f(m.x - h2)) / (h2 * h2);
    if (!(d2 > 0.0)) break;
    const double x = m.x - d1 / d2;
    if (!(x > grid[best - 1]) || !(x < grid[best + 1])) break;
    const double v = f(x);
    if (v > m.value) break;
    m = {x, v};
  }
  return m;
}

}  // namespace

absl::StatusOr<PiecewiseExpDensity> LaplaceDensity(double eps) {
  if (absl::Status s = ValidateEpsK(eps, 1); !s.ok()) return s;
  const double log_peak = std::log(0.5 * eps);
  return PiecewiseExpDensity::Create(
      Domain::Line(),
      {{-kInf, 0.0, log_peak, eps}, {0.0, kInf, log_peak, -eps}});
}

absl::StatusOr<OffsetSet> OptimalOffsetsClosed(double eps, int k) {
  if (absl::Status s = ValidateEpsK(eps, k); !s.ok()) return s;
  std::vector<double> positive;
  if (k % 2 == 1) {
    const int t = (k - 1) / 2;
    for (int j = t; j >= 1; --j) {
      positive.push_back(2.0 * std::log(static_cast<double>(t + 1) / j) / eps);
    }
  } else {
    const int t = k / 2;
    const double tt = static_cast<double>(t) * (t + 1);
    for (int i = t; i >= 1; --i) {
      positive.push_back(std::log(tt / (static_cast<double>(i) * i)) / eps);
    }
  }
  std::vector<double> all;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    all.push_back(-*it);
  }
  if (k % 2 == 1) all.push_back(0.0);
  all.insert(all.end(), positive.begin(), positive.end());
  return OffsetSet::Create(std::move(all));
}

absl::StatusOr<double> ClosedFormCost(double eps, int k) {
  if (absl::Status s = ValidateEpsK(eps, k); !s.ok()) return s;
  if (k % 2 == 1) return 2.0 / (eps * (k + 1));
  return std::log1p(2.0 / k) / eps;
}

absl::StatusOr<RecurrenceResult> OptimalOffsetsRecurrence(
    double eps, int k, const DisutilityFn& h) {
  if (absl::Status s = ValidateEpsK(eps, k); !s.ok()) return s;
  const int b_max = k % 2 == 1 ? (k + 1) / 2 : k / 2;

  std::vector<double> d{BaseConditionalCost(h)};
  std::vector<double> gaps;
  for (int b = 1; b < b_max; ++b) {
    const double tail = d.back();
    absl::StatusOr<numerics::Minimum> m = MinimizeStep(
        [&h, tail](double s) { return OddStepCost(h, s, tail); });
    if (!m.ok()) return m.status();
    gaps.push_back(m->x);
    d.push_back(m->value);
  }

  // Positive offsets in units of 1 / eps, innermost first.
  std::vector<double> positive;
  double cost;
  double inner = 0.0;
  if (k % 2 == 1) {
    double y = 0.0;
    for (int i = 1; i < b_max; ++i) {
      y += gaps[b_max - 1 - i];
      positive.push_back(y);
    }
    cost = d.back();
  } else {
    const double tail = d.back();
    absl::StatusOr<numerics::Minimum> m = MinimizeStep(
        [&h, tail](double s0) { return EvenBaseCost(h, s0, tail); });
    if (!m.ok()) return m.status();
    inner = m->x;
    double y = inner;
    positive.push_back(y);
    for (int i = 1; i < b_max; ++i) {
      y += gaps[b_max - 1 - i];
      positive.push_back(y);
    }
    cost = m->value;
  }

  std::vector<double> all;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    all.push_back(-*it / eps);
  }
  if (k % 2 == 1) all.push_back(0.0);
  for (double y : positive) all.push_back(y / eps);
  absl::StatusOr<OffsetSet> offsets = OffsetSet::Create(std::move(all));
  if (!offsets.ok()) return offsets.status();
  return RecurrenceResult{*std::move(offsets), cost / eps, std::move(d),
                          std::move(gaps), inner};
}

double MedianReport::MaxAbsResidual() const {
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, std::fabs(r));
  return worst;
}

MedianReport MedianCondition(const PiecewiseExpDensity& density,
                             const OffsetSet& offsets) {
  MedianReport report;
  const size_t k = offsets.size();
  for (size_t i = 0; i + 1 < k; ++i) {
    report.midpoints.push_back(0.5 * (offsets[i] + offsets[i + 1]));
  }
  const double total = density.total_mass();
  for (size_t i = 0; i < k; ++i) {
    const double left = i == 0 ? -kInf : report.midpoints[i - 1];
    const double right = i + 1 == k ? kInf : report.midpoints[i];
    report.residuals.push_back(
        (density.Mass(left, offsets[i]) - density.Mass(offsets[i], right)) /
        total);
  }
  return report;
}

absl::StatusOr<double> EffectiveEpsilon(double g_prime_at_zero) {
  if (!(g_prime_at_zero > 0.0) || !std::isfinite(g_prime_at_zero)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "NonPositiveDerivative: g'(0) must be positive, got %g",
        g_prime_at_zero));
  }
  return g_prime_at_zero;
}

double DerivativeAtZero(const std::function<double(double)>& g) {
  // Richardson extrapolation of forward differences, O(h^3) error.
  const double h = 1e-3;
  const double d1 = (g(h) - g(0.0)) / h;
  const double d2 = (g(h / 2) - g(0.0)) / (h / 2);
  const double d4 = (g(h / 4) - g(0.0)) / (h / 4);
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d4 - d2;
  return (4.0 * r2 - r1) / 3.0;
}

}  // namespace msdp
