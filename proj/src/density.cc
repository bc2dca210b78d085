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

#include "msdp/density.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_format.h"
#include "numerics.h"

namespace msdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kContinuityTolerance = 1e-9;
constexpr double kRateTolerance = 1e-12;

// expm1(z) / z.
double Phi1(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

// (e^z (z - 1) + 1) / z^2, i.e. the integral of u e^{zu} over [0, 1].
double Phi2(double z) {
  if (std::fabs(z) < 0.1) {
    double term = 1.0;  // z^n / n!
    double sum = 0.0;
    for (int n = 0; n <= 12; ++n) {
      sum += term / (n + 2);
      term *= z / (n + 1);
    }
    return sum;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

// Integral over [p, q] (a sub-interval of the segment) of
// (alpha x + beta) exp(log_coeff + rate x). The expansion point is the end
// where the exponential is largest so every exponent evaluated is <= 0.
double LinearExpIntegral(const ExpSegment& seg, double p, double q,
                         double alpha, double beta) {
  if (!(q > p)) return 0.0;
  const double b = seg.rate;
  const double w = q - p;
  double anchor;
  double j0;
  double j1;
  if (b <= 0.0) {
    anchor = p;
    if (std::isinf(w)) {
      j0 = -1.0 / b;
      j1 = 1.0 / (b * b);
    } else {
      j0 = w * Phi1(b * w);
      j1 = w * w * Phi2(b * w);
    }
  } else {
    anchor = q;
    if (std::isinf(w)) {
      j0 = 1.0 / b;
      j1 = -1.0 / (b * b);
    } else {
      j0 = w * Phi1(-b * w);
      j1 = -w * w * Phi2(-b * w);
    }
  }
  const double scale = std::exp(seg.LogValue(anchor));
  double result = (beta + alpha * anchor) * j0;
  if (alpha != 0.0) result += alpha * j1;
  return scale * result;
}

// Signed displacement x - a; on the ring wrapped into (-C/2, C/2].
double SignedDisplacement(const Domain& domain, double x, double a) {
  double delta = x - a;
  if (!domain.is_ring()) return delta;
  const double c = domain.circumference();
  delta = std::fmod(delta, c);
  if (delta > 0.5 * c) delta -= c;
  if (delta <= -0.5 * c) delta += c;
  return delta;
}

// Points where min_a d(x, a) may fail to be linear.
std::vector<double> CostKinks(const Domain& domain, const OffsetSet& offsets) {
  std::vector<double> kinks;
  if (!domain.is_ring()) {
    for (size_t i = 0; i < offsets.size(); ++i) {
      kinks.push_back(offsets[i]);
      if (i + 1 < offsets.size()) {
        kinks.push_back(0.5 * (offsets[i] + offsets[i + 1]));
      }
    }
  } else {
    const double c = domain.circumference();
    std::vector<double> wrapped;
    for (double a : offsets.values()) wrapped.push_back(domain.Wrap(a));
    std::sort(wrapped.begin(), wrapped.end());
    for (size_t i = 0; i < wrapped.size(); ++i) {
      kinks.push_back(wrapped[i]);
      kinks.push_back(domain.Wrap(wrapped[i] + 0.5 * c));
      const double next =
          i + 1 < wrapped.size() ? wrapped[i + 1] : wrapped[0] + c;
      kinks.push_back(domain.Wrap(0.5 * (wrapped[i] + next)));
    }
  }
  std::sort(kinks.begin(), kinks.end());
  return kinks;
}

double RepresentativePoint(double p, double q) {
  if (std::isfinite(p) && std::isfinite(q)) return 0.5 * (p + q);
  return std::isfinite(p) ? p + 1.0 : q - 1.0;
}

absl::Status ValidateSegments(const Domain& domain,
                              const std::vector<ExpSegment>& segments) {
  if (segments.empty()) {
    return absl::InvalidArgumentError("GapOrOverlap: no segments");
  }
  const size_t n = segments.size();
  for (size_t i = 0; i < n; ++i) {
    const ExpSegment& s = segments[i];
    if (std::isnan(s.lo) || std::isnan(s.hi) || !(s.lo < s.hi)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "GapOrOverlap: segment %d has empty range [%g, %g)", i, s.lo, s.hi));
    }
    if (!std::isfinite(s.log_coeff) || !std::isfinite(s.rate)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Segment %d has non-finite parameters", i));
    }
    if (i + 1 < n && s.hi != segments[i + 1].lo) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "GapOrOverlap: segment %d ends at %g but segment %d starts at %g", i,
          s.hi, i + 1, segments[i + 1].lo));
    }
    if (i > 0 && std::isinf(s.lo)) {
      return absl::InvalidArgumentError("GapOrOverlap: interior infinite bound");
    }
    if (i + 1 < n && std::isinf(s.hi)) {
      return absl::InvalidArgumentError("GapOrOverlap: interior infinite bound");
    }
    if (std::isfinite(s.lo) && !std::isfinite(s.LogValue(s.lo))) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Segment %d density is not finite at %g", i, s.lo));
    }
    if (std::isfinite(s.hi) && !std::isfinite(s.LogValue(s.hi))) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Segment %d density is not finite at %g", i, s.hi));
    }
  }
  if (domain.is_ring()) {
    const double c = domain.circumference();
    if (!(c > 0.0) || !std::isfinite(c)) {
      return absl::InvalidArgumentError("Ring circumference must be positive");
    }
    if (segments.front().lo != 0.0 || segments.back().hi != c) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "GapOrOverlap: ring segments must tile [0, %g)", c));
    }
  } else {
    if (segments.front().lo != -kInf || segments.back().hi != kInf) {
      return absl::InvalidArgumentError(
          "GapOrOverlap: line segments must tile (-inf, +inf)");
    }
    if (!(segments.front().rate > 0.0)) {
      return absl::InvalidArgumentError(
          "NonIntegrableTail: left tail needs a positive rate");
    }
    if (!(segments.back().rate < 0.0)) {
      return absl::InvalidArgumentError(
          "NonIntegrableTail: right tail needs a negative rate");
    }
  }
  return absl::OkStatus();
}

// Log-density jump at breakpoint i (right minus left).
double BreakpointJump(const Domain& domain,
                      std::span<const ExpSegment> segments, size_t i) {
  const ExpSegment& left = segments[i];
  if (i + 1 < segments.size()) {
    return segments[i + 1].LogValue(left.hi) - left.LogValue(left.hi);
  }
  return segments[0].LogValue(0.0) - left.LogValue(domain.circumference());
}

size_t BreakpointCount(const Domain& domain, size_t segment_count) {
  return domain.is_ring() ? segment_count : segment_count - 1;
}

}  // namespace

double Domain::Distance(double x, double y) const {
  const double d = std::fabs(x - y);
  if (!is_ring()) return d;
  const double r = std::fmod(d, circumference_);
  return std::min(r, circumference_ - r);
}

double Domain::Wrap(double x) const {
  if (!is_ring()) return x;
  double r = std::fmod(x, circumference_);
  if (r < 0.0) r += circumference_;
  if (r >= circumference_) r = 0.0;
  return r;
}

PiecewiseExpDensity::PiecewiseExpDensity(Domain domain,
                                         std::vector<ExpSegment> segments,
                                         std::vector<size_t> jumps)
    : domain_(domain), segments_(std::move(segments)), jumps_(std::move(jumps)) {
  numerics::CompensatedSum total;
  cumulative_.reserve(segments_.size() + 1);
  cumulative_.push_back(0.0);
  for (const ExpSegment& s : segments_) {
    const double m = LinearExpIntegral(s, s.lo, s.hi, 0.0, 1.0);
    masses_.push_back(m);
    total.Add(m);
    cumulative_.push_back(total.Total());
  }
  total_mass_ = total.Total();
}

absl::StatusOr<PiecewiseExpDensity> PiecewiseExpDensity::Create(
    Domain domain, std::vector<ExpSegment> segments,
    std::vector<size_t> jump_breakpoints) {
  if (absl::Status s = ValidateSegments(domain, segments); !s.ok()) return s;
  std::sort(jump_breakpoints.begin(), jump_breakpoints.end());
  jump_breakpoints.erase(
      std::unique(jump_breakpoints.begin(), jump_breakpoints.end()),
      jump_breakpoints.end());
  const size_t breakpoints = BreakpointCount(domain, segments.size());
  for (size_t j : jump_breakpoints) {
    if (j >= breakpoints) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Jump flag %d refers to no breakpoint", j));
    }
  }
  for (size_t i = 0; i < breakpoints; ++i) {
    const double jump = BreakpointJump(domain, segments, i);
    if (std::fabs(jump) > kContinuityTolerance &&
        !std::binary_search(jump_breakpoints.begin(), jump_breakpoints.end(),
                            i)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "Density is discontinuous at unflagged breakpoint %d (log jump %g)",
          i, jump));
    }
  }
  PiecewiseExpDensity density(domain, std::move(segments),
                              std::move(jump_breakpoints));
  if (!(density.total_mass_ > 0.0) || !std::isfinite(density.total_mass_)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Density mass must be positive and finite, got %g", density.total_mass_));
  }
  return density;
}

bool PiecewiseExpDensity::JumpAllowed(size_t breakpoint) const {
  return std::binary_search(jumps_.begin(), jumps_.end(), breakpoint);
}

PiecewiseExpDensity PiecewiseExpDensity::Normalized() const {
  const double shift = std::log(total_mass_);
  std::vector<ExpSegment> segments = segments_;
  for (ExpSegment& s : segments) s.log_coeff -= shift;
  return PiecewiseExpDensity(domain_, std::move(segments), jumps_);
}

size_t PiecewiseExpDensity::SegmentIndex(double x) const {
  x = domain_.Wrap(x);
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), x,
      [](double v, const ExpSegment& s) { return v < s.lo; });
  if (it == segments_.begin()) return 0;
  return static_cast<size_t>(it - segments_.begin()) - 1;
}

double PiecewiseExpDensity::LogValue(double x) const {
  x = domain_.Wrap(x);
  return segments_[SegmentIndex(x)].LogValue(x);
}

double PiecewiseExpDensity::Value(double x) const {
  return std::exp(LogValue(x));
}

double PiecewiseExpDensity::Mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  numerics::CompensatedSum sum;
  for (const ExpSegment& s : segments_) {
    const double p = std::max(a, s.lo);
    const double q = std::min(b, s.hi);
    if (q > p) sum.Add(LinearExpIntegral(s, p, q, 0.0, 1.0));
  }
  return sum.Total();
}

double PiecewiseExpDensity::Cdf(double x) const {
  if (domain_.is_ring()) return Mass(0.0, domain_.Wrap(x)) / total_mass_;
  if (x == kInf) return 1.0;
  return Mass(-kInf, x) / total_mass_;
}

double PiecewiseExpDensity::InvertWithinSegment(size_t index,
                                                double fraction) const {
  const ExpSegment& s = segments_[index];
  const double b = s.rate;
  const double w = s.hi - s.lo;
  double x;
  if (b == 0.0) {
    x = s.lo + fraction * w;
  } else if (b < 0.0) {
    x = std::isinf(w) ? s.lo + std::log1p(-fraction) / b
                      : s.lo + std::log1p(fraction * std::expm1(b * w)) / b;
  } else {
    x = std::isinf(w)
            ? s.hi + std::log(fraction) / b
            : s.hi + std::log1p((1.0 - fraction) * std::expm1(-b * w)) / b;
  }
  return std::clamp(x, s.lo, s.hi);
}

double PiecewiseExpDensity::Quantile(double p) const {
  const double target = p * total_mass_;
  auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), target);
  size_t index = static_cast<size_t>(it - cumulative_.begin()) - 1;
  index = std::min(index, segments_.size() - 1);
  double fraction = (target - cumulative_[index]) / masses_[index];
  fraction = std::clamp(fraction, 0.0, 1.0);
  return InvertWithinSegment(index, fraction);
}

double PiecewiseExpDensity::Sample(Rng& rng) const {
  const double target = rng.UniformOpen() * total_mass_;
  auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), target);
  size_t index = static_cast<size_t>(it - cumulative_.begin()) - 1;
  index = std::min(index, segments_.size() - 1);
  double x = InvertWithinSegment(index, rng.UniformOpen());
  if (domain_.is_ring() && x >= domain_.circumference()) x = 0.0;
  return x;
}

absl::StatusOr<PiecewiseExpDensity> Normalize(
    Domain domain, std::vector<ExpSegment> segments,
    std::vector<size_t> jump_breakpoints) {
  absl::StatusOr<PiecewiseExpDensity> raw = PiecewiseExpDensity::Create(
      domain, std::move(segments), std::move(jump_breakpoints));
  if (!raw.ok()) return raw.status();
  return raw->Normalized();
}

absl::StatusOr<PiecewiseExpDensity> FromLogSamples(
    Domain domain, std::span<const double> xs,
    std::span<const double> log_values, double left_tail_rate,
    double right_tail_rate) {
  if (xs.size() < 2 || xs.size() != log_values.size()) {
    return absl::InvalidArgumentError(
        "Need at least two nodes and one log value per node");
  }
  std::vector<ExpSegment> segments;
  if (!domain.is_ring()) {
    segments.push_back({-kInf, xs[0], log_values[0] - left_tail_rate * xs[0],
                        left_tail_rate});
  }
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const double rate =
        (log_values[i + 1] - log_values[i]) / (xs[i + 1] - xs[i]);
    segments.push_back(
        {xs[i], xs[i + 1], log_values[i] - rate * xs[i], rate});
  }
  if (!domain.is_ring()) {
    segments.push_back({xs.back(), kInf,
                        log_values.back() - right_tail_rate * xs.back(),
                        right_tail_rate});
  }
  return Normalize(domain, std::move(segments));
}

PrivacyReport CheckPrivacy(const PiecewiseExpDensity& density, double eps,
                           PrivacyMetric metric) {
  PrivacyReport report;
  std::span<const ExpSegment> segments = density.segments();
  const Domain& domain = density.domain();
  if (metric == PrivacyMetric::kLocal) {
    double sup_log = -kInf;
    double inf_log = kInf;
    for (const ExpSegment& s : segments) {
      for (double x : {s.lo, s.hi}) {
        const double v = std::isinf(x) ? -kInf : s.LogValue(x);
        if (v > sup_log) {
          sup_log = v;
          report.witness_x = x;
        }
        if (v < inf_log) {
          inf_log = v;
          report.witness_y = x;
        }
      }
    }
    const double spread = sup_log - inf_log;
    report.worst_ratio_log = spread - eps;
    report.satisfied = spread <= eps + kRateTolerance;
    return report;
  }

  bool rates_ok = true;
  bool continuous = true;
  report.worst_ratio_log = -kInf;
  for (const ExpSegment& s : segments) {
    const double w = std::min(s.hi - s.lo, 1.0);
    const double excess = (std::fabs(s.rate) - eps) * w;
    if (std::fabs(s.rate) > eps + kRateTolerance) rates_ok = false;
    if (excess > report.worst_ratio_log) {
      const double start = std::isfinite(s.lo) ? s.lo : s.hi - w;
      report.worst_ratio_log = excess;
      report.witness_x = s.rate >= 0.0 ? start + w : start;
      report.witness_y = s.rate >= 0.0 ? start : start + w;
    }
  }
  // Flagged jumps are legal for the density type but never Lipschitz.
  const size_t breakpoints = BreakpointCount(domain, segments.size());
  for (size_t i = 0; i < breakpoints; ++i) {
    const double jump = BreakpointJump(domain, segments, i);
    if (std::fabs(jump) > kPrivacyTolerance) continuous = false;
    if (std::fabs(jump) > report.worst_ratio_log) {
      const double at = segments[i].hi;
      report.worst_ratio_log = std::fabs(jump);
      report.witness_x = domain.Wrap(at);
      report.witness_y = domain.Wrap(at);
    }
  }
  report.satisfied = rates_ok && continuous;
  return report;
}

NearestPoint FindNearest(const Domain& domain, std::span<const double> points,
                         double x) {
  NearestPoint best{0, kInf};
  for (size_t i = 0; i < points.size(); ++i) {
    const double d = domain.Distance(x, points[i]);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

double ExpectedMinDisutility(const PiecewiseExpDensity& density,
                             const OffsetSet& offsets, const DisutilityFn& h) {
  const Domain& domain = density.domain();
  const std::vector<double> kinks = CostKinks(domain, offsets);
  const double log_mass = std::log(density.total_mass());
  numerics::CompensatedSum total;
  std::vector<double> cuts;
  for (const ExpSegment& seg : density.segments()) {
    cuts.clear();
    cuts.push_back(seg.lo);
    for (double k : kinks) {
      if (k > seg.lo && k < seg.hi) cuts.push_back(k);
    }
    cuts.push_back(seg.hi);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double p = cuts[i];
      const double q = cuts[i + 1];
      if (!(q > p)) continue;
      const double m = RepresentativePoint(p, q);
      const NearestPoint nearest = FindNearest(domain, offsets.values(), m);
      if (h.is_identity()) {
        const double delta =
            SignedDisplacement(domain, m, offsets[nearest.index]);
        const double slope = delta >= 0.0 ? 1.0 : -1.0;
        total.Add(LinearExpIntegral(seg, p, q, slope,
                                    std::fabs(delta) - slope * m));
        continue;
      }
      // Tails are cut where the density has decayed by e^-50.
      double lo = p;
      double hi = q;
      if (std::isinf(lo)) lo = hi - 50.0 / seg.rate;
      if (std::isinf(hi)) hi = lo + 50.0 / -seg.rate;
      auto integrand = [&](double x) {
        return h(domain.Distance(x, offsets[nearest.index])) *
               std::exp(seg.LogValue(x) - log_mass);
      };
      total.Add(numerics::AdaptiveSimpson(integrand, lo, hi, 1e-10, 40));
    }
  }
  return h.is_identity() ? total.Total() / density.total_mass()
                         : total.Total();
}

absl::StatusOr<PiecewiseExpDensity> PieceExpProject(
    const PiecewiseExpDensity& density, const OffsetSet& offsets, double gamma,
    double eps) {
  if (density.domain().is_ring()) {
    return absl::InvalidArgumentError("Projection is defined on the line only");
  }
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError("NonPositiveEpsilon: eps must be > 0");
  }
  const PrivacyReport privacy =
      CheckPrivacy(density, eps, PrivacyMetric::kGeographic);
  if (!privacy.satisfied) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "PrivacyViolated: input density is not %g-geographically private "
        "(worst log ratio %g)",
        eps, privacy.worst_ratio_log));
  }
  const double cost =
      ExpectedMinDisutility(density, offsets, DisutilityFn::Identity());
  if (!(gamma > 0.0) || gamma < cost * (1.0 - 1e-12)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "gamma = %g must be positive and at least the current cost %g", gamma,
        cost));
  }

  // Full intervals are the merged [a - gamma, a + gamma].
  std::vector<std::pair<double, double>> full;
  for (double a : offsets.values()) {
    if (!full.empty() && a - gamma <= full.back().second) {
      full.back().second = a + gamma;
    } else {
      full.emplace_back(a - gamma, a + gamma);
    }
  }

  std::vector<ExpSegment> segments;
  auto push = [&segments](double lo, double hi, double log_coeff, double rate) {
    if (hi > lo) segments.push_back({lo, hi, log_coeff, rate});
  };
  const double first = full.front().first;
  push(-kInf, first, density.LogValue(first) - eps * first, eps);
  for (size_t i = 0; i < full.size(); ++i) {
    const auto [a, b] = full[i];
    const double la = density.LogValue(a);
    const double lb = density.LogValue(b);
    // Pointwise min of the rising branch through a and the falling branch
    // through b.
    const double peak = std::clamp(0.5 * (a + b) + (lb - la) / (2.0 * eps), a, b);
    push(a, peak, la - eps * a, eps);
    push(peak, b, lb + eps * b, -eps);
    if (i + 1 < full.size()) {
      // Empty interval: pointwise max of the branches decaying away from
      // its two ends.
      const double c = full[i + 1].first;
      const double lc = density.LogValue(c);
      const double valley =
          std::clamp(0.5 * (b + c) + (lb - lc) / (2.0 * eps), b, c);
      push(b, valley, lb + eps * b, -eps);
      push(valley, c, lc - eps * c, eps);
    }
  }
  const double last = full.back().second;
  push(last, kInf, density.LogValue(last) + eps * last, -eps);
  return Normalize(Domain::Line(), std::move(segments));
}

absl::StatusOr<SpaceRemovalResult> SpaceRemoval(
    const PiecewiseExpDensity& density, const OffsetSet& offsets, double a,
    double b) {
  if (density.domain().is_ring()) {
    return absl::InvalidArgumentError("Space removal is defined on the line only");
  }
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Space removal needs finite a < b, got [%g, %g)", a, b));
  }
  const double la = density.LogValue(a);
  const double lb = density.LogValue(b);
  if (std::fabs(la - lb) > kContinuityTolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "EndpointMismatch: rho(%g) and rho(%g) differ (log gap %g)", a, b,
        lb - la));
  }
  const double width = b - a;
  std::vector<ExpSegment> segments;
  for (const ExpSegment& s : density.segments()) {
    if (s.lo < a) {
      segments.push_back({s.lo, std::min(s.hi, a), s.log_coeff, s.rate});
    }
  }
  for (const ExpSegment& s : density.segments()) {
    if (s.hi > b) {
      const double lo = std::max(s.lo, b);
      segments.push_back(
          {lo - width, s.hi - width, s.log_coeff + s.rate * width, s.rate});
    }
  }
  // Fold the endpoint mismatch (<= tolerance) into the right half so the
  // splice is exactly continuous.
  const size_t left_count = static_cast<size_t>(std::count_if(
      density.segments().begin(), density.segments().end(),
      [a](const ExpSegment& s) { return s.lo < a; }));
  const double mismatch = la - lb;
  for (size_t i = left_count; i < segments.size(); ++i) {
    segments[i].log_coeff += mismatch;
  }
  absl::StatusOr<PiecewiseExpDensity> spliced =
      Normalize(Domain::Line(), std::move(segments));
  if (!spliced.ok()) return spliced.status();

  std::vector<double> moved;
  for (double x : offsets.values()) {
    if (x < a) {
      moved.push_back(x);
    } else if (x < b) {
      moved.push_back(a);
    } else {
      moved.push_back(x - width);
    }
  }
  absl::StatusOr<OffsetSet> new_offsets = OffsetSet::FromUnsorted(moved);
  if (!new_offsets.ok()) return new_offsets.status();
  return SpaceRemovalResult{*std::move(spliced), *std::move(new_offsets)};
}

}  // namespace msdp
