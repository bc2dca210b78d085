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

#include "msdp/dual.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "msdp/line_mech.h"

namespace msdp {
namespace {

constexpr double kDivergence = 1e200;
constexpr double kLocalErrorLimit = 1e-8;
constexpr double kTailWindow = 0.2;

struct SideTrace {
  // Distance from v_med and nu, in integration order.
  std::vector<double> s;
  std::vector<double> nu;
  double nu_end = 0.0;
  bool diverged = false;
  double max_error = 0.0;
};

class Integrator {
 public:
  Integrator(const DualProblem& p, int dir) : p_(p), dir_(dir), v_med_(p.VMed()) {}

  // d nu / d s with r = v_med + dir * s.
  double Rhs(double s, double nu) const {
    const double r = v_med_ + dir_ * s;
    double m = p_.h(std::fabs(r - p_.v.front()));
    for (double a : p_.v) m = std::min(m, p_.h(std::fabs(r - a)));
    const double delta = 0.5 * p_.zeta * std::exp(-p_.zeta * std::fabs(r));
    return dir_ * (delta * (m - p_.lambda_hat) - p_.eps * std::fabs(nu));
  }

  double Rk4(double s, double nu, double h) const {
    const double k1 = Rhs(s, nu);
    const double k2 = Rhs(s + 0.5 * h, nu + 0.5 * h * k1);
    const double k3 = Rhs(s + 0.5 * h, nu + 0.5 * h * k2);
    const double k4 = Rhs(s + h, nu + h * k3);
    return nu + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // Distances from v_med at which the forcing term has a kink.
  std::vector<double> Kinks() const {
    std::vector<double> points(p_.v.begin(), p_.v.end());
    for (size_t i = 0; i + 1 < p_.v.size(); ++i) {
      points.push_back(0.5 * (p_.v[i] + p_.v[i + 1]));
    }
    points.push_back(0.0);
    std::vector<double> out;
    for (double c : points) {
      const double s = dir_ * (c - v_med_);
      if (s > 0.0) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  absl::StatusOr<SideTrace> Run(double s_end, double step,
                                size_t max_samples) const {
    SideTrace out;
    const std::vector<double> kinks = Kinks();
    size_t next_kink = 0;
    const size_t stride = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(s_end / step / max_samples)));
    double s = 0.0;
    double nu = 0.0;
    size_t steps = 0;
    out.s.push_back(s);
    out.nu.push_back(nu);
    while (s < s_end) {
      while (next_kink < kinks.size() && kinks[next_kink] <= s) ++next_kink;
      double h = std::min(step, s_end - s);
      if (next_kink < kinks.size() && kinks[next_kink] < s + h) {
        h = kinks[next_kink] - s;
      }
      double err = 0.0;
      double next = Advance(s, nu, h, &err);
      if (nu != 0.0 && std::signbit(next) != std::signbit(nu) && next != 0.0) {
        // Shorten the step to land on the zero of nu.
        double lo = 0.0;
        double hi = h;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          if (std::signbit(Rk4(s, nu, mid)) == std::signbit(nu)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        h = hi;
        err = 0.0;
        Advance(s, nu, h, &err);
        next = 0.0;
      }
      out.max_error = std::max(out.max_error, err);
      if (out.max_error > kLocalErrorLimit) {
        return absl::OutOfRangeError(absl::StrFormat(
            "StepTooLarge: local error %g at r = %g exceeds %g", out.max_error,
            v_med_ + dir_ * s, kLocalErrorLimit));
      }
      s = (s_end - (s + h) < 1e-14 * std::max(1.0, s_end)) ? s_end : s + h;
      nu = next;
      ++steps;
      if (std::fabs(nu) > kDivergence) {
        out.diverged = true;
        out.s.push_back(s);
        out.nu.push_back(nu);
        break;
      }
      if (steps % stride == 0 || s >= s_end) {
        out.s.push_back(s);
        out.nu.push_back(nu);
      }
    }
    out.nu_end = nu;
    return out;
  }

 private:
  // Two half steps, with the single full step as the error estimate. The
  // error is measured relative to max(1, |nu|).
  double Advance(double s, double nu, double h, double* max_error) const {
    const double full = Rk4(s, nu, h);
    const double half = Rk4(s + 0.5 * h, Rk4(s, nu, 0.5 * h), 0.5 * h);
    const double err = std::fabs(full - half) / std::max(1.0, std::fabs(half));
    *max_error = std::max(*max_error, err);
    return half;
  }

  const DualProblem& p_;
  int dir_;
  double v_med_;
};

// Classifies the outer kTailWindow of a side. `sign` is +1 on the right,
// where nu should end nonnegative, and -1 on the left.
TailClass Classify(const SideTrace& t, int sign, double* tol_out,
                   std::optional<double>* settled_from) {
  const double reach = t.s.back();
  const double window_start = (1.0 - kTailWindow) * reach;
  double scale = 0.0;
  for (size_t i = 0; i < t.s.size() && t.s[i] < window_start; ++i) {
    scale = std::max(scale, std::fabs(t.nu[i]));
  }
  if (scale == 0.0) {
    for (double x : t.nu) scale = std::max(scale, std::fabs(x));
  }
  const double tol = 1e-6 * scale;
  *tol_out = tol;
  bool all_good = true;
  bool all_bad = true;
  for (size_t i = 0; i < t.s.size(); ++i) {
    if (t.s[i] < window_start) continue;
    const double x = sign * t.nu[i];
    if (x < -tol) all_good = false;
    if (x >= -tol) all_bad = false;
  }
  if (all_good) {
    size_t first = t.s.size();
    while (first > 0 && sign * t.nu[first - 1] >= -tol) --first;
    *settled_from = t.s[first];
    return sign > 0 ? TailClass::kNonnegativeTail : TailClass::kNonpositiveTail;
  }
  if (all_bad) {
    return sign > 0 ? TailClass::kNegativeTail : TailClass::kPositiveTail;
  }
  return TailClass::kUndetermined;
}

}  // namespace

absl::Status DualProblem::Validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("NonPositiveEpsilon: eps must be positive, got %g", eps));
  }
  if (!(zeta > 0.0) || !(zeta < eps)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("zeta must lie in (0, eps), got %g", zeta));
  }
  if (!(lambda_hat > 0.0) || !std::isfinite(lambda_hat)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda_hat must be positive, got %g", lambda_hat));
  }
  if (v.empty()) return absl::InvalidArgumentError("v must be nonempty");
  for (size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || (i > 0 && v[i] < v[i - 1])) {
      return absl::InvalidArgumentError("v must be finite and sorted");
    }
  }
  return absl::OkStatus();
}

double DualProblem::VMed() const { return v[(v.size() - 1) / 2]; }

std::string_view TailClassName(TailClass c) {
  switch (c) {
    case TailClass::kNonnegativeTail:
      return "NonnegativeTail";
    case TailClass::kNegativeTail:
      return "NegativeTail";
    case TailClass::kNonpositiveTail:
      return "NonpositiveTail";
    case TailClass::kPositiveTail:
      return "PositiveTail";
    case TailClass::kUndetermined:
      break;
  }
  return "Undetermined";
}

double DefaultRMax(const DualProblem& p) {
  double m = 0.0;
  for (double a : p.v) m = std::max(m, std::fabs(a));
  return m + 25.0 / std::min(p.eps, p.zeta);
}

absl::StatusOr<DualTrace> SolveDualOde(const DualProblem& p, double r_max,
                                       double step,
                                       size_t max_samples_per_side) {
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  double max_abs_v = 0.0;
  for (double a : p.v) max_abs_v = std::max(max_abs_v, std::fabs(a));
  if (!(r_max >= max_abs_v + 20.0 / p.eps)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "r_max must be at least max|v| + 20 / eps = %g, got %g",
        max_abs_v + 20.0 / p.eps, r_max));
  }
  if (!(step > 0.0) || step > 1e-3) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step must lie in (0, 1e-3], got %g", step));
  }
  if (max_samples_per_side < 2) max_samples_per_side = 2;
  const double v_med = p.VMed();

  absl::StatusOr<SideTrace> right =
      Integrator(p, +1).Run(r_max - v_med, step, max_samples_per_side);
  if (!right.ok()) return right.status();
  absl::StatusOr<SideTrace> left =
      Integrator(p, -1).Run(r_max + v_med, step, max_samples_per_side);
  if (!left.ok()) return left.status();

  DualTrace trace;
  for (size_t i = left->s.size(); i-- > 1;) {
    trace.r_grid.push_back(v_med - left->s[i]);
    trace.nu.push_back(left->nu[i]);
  }
  trace.med_index = trace.r_grid.size();
  for (size_t i = 0; i < right->s.size(); ++i) {
    trace.r_grid.push_back(v_med + right->s[i]);
    trace.nu.push_back(right->nu[i]);
  }
  double tol;
  std::optional<double> settled;
  trace.right_tail = Classify(*right, +1, &tol, &settled);
  if (settled.has_value()) trace.nonneg_from = v_med + *settled;
  settled.reset();
  trace.left_tail = Classify(*left, -1, &tol, &settled);
  if (settled.has_value()) trace.nonpos_until = v_med - *settled;
  trace.nu_right_end = right->nu_end;
  trace.nu_left_end = left->nu_end;
  trace.diverged_right = right->diverged;
  trace.diverged_left = left->diverged;
  trace.max_local_error = std::max(right->max_error, left->max_error);
  return trace;
}

absl::StatusOr<double> DualThreshold(double eps, double zeta, int k) {
  if (!(eps > 0.0) || !(zeta > 0.0) || !(zeta < eps)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 < zeta < eps, got eps = %g, zeta = %g", eps, zeta));
  }
  absl::StatusOr<double> f = ClosedFormCost(eps + zeta, k);
  if (!f.ok()) return f.status();
  return (eps - zeta) / (eps + zeta) * *f;
}

absl::StatusOr<CrossingResult> EmpiricalCrossing(DualProblem p, double lo,
                                                 double hi, double tol,
                                                 double step) {
  if (!(lo > 0.0) || !(hi > lo) || !(tol > 0.0)) {
    return absl::InvalidArgumentError("need 0 < lo < hi and tol > 0");
  }
  auto valid_at = [&p, step](double lambda) -> absl::StatusOr<bool> {
    p.lambda_hat = lambda;
    absl::StatusOr<DualTrace> t = SolveDualOde(p, DefaultRMax(p), step, 64);
    if (!t.ok()) return t.status();
    return t->IsValid();
  };
  absl::StatusOr<bool> at_lo = valid_at(lo);
  if (!at_lo.ok()) return at_lo.status();
  absl::StatusOr<bool> at_hi = valid_at(hi);
  if (!at_hi.ok()) return at_hi.status();
  if (!*at_lo || *at_hi) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no crossing bracketed: valid(%g) = %d, valid(%g) = %d", lo, *at_lo,
        hi, *at_hi));
  }
  int iterations = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<bool> ok = valid_at(mid);
    if (!ok.ok()) return ok.status();
    (*ok ? lo : hi) = mid;
    ++iterations;
  }
  return CrossingResult{0.5 * (lo + hi), lo, hi, iterations};
}

}  // namespace msdp
