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

// Piecewise-exponential probability densities on the real line and on a
// circle, with exact integration against piecewise-linear costs, inverse-CDF
// sampling, an analytic privacy check, and the two structural transformations
// used to reason about optimal noise (projection onto rate +-eps pieces and
// space removal).

#ifndef MSDP_DENSITY_H_
#define MSDP_DENSITY_H_

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "msdp/disutility.h"
#include "msdp/offset_set.h"
#include "msdp/rng.h"

namespace msdp {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Domain {
 public:
  enum class Kind { kLine, kRing };

  static Domain Line() { return Domain(Kind::kLine, 0.0); }
  static Domain Ring(double circumference = kTwoPi) {
    return Domain(Kind::kRing, circumference);
  }

  Kind kind() const { return kind_; }
  bool is_ring() const { return kind_ == Kind::kRing; }
  // Zero for the line.
  double circumference() const { return circumference_; }

  // |x - y| on the line, geodesic min(|x - y|, C - |x - y|) on the ring.
  double Distance(double x, double y) const;
  // Maps x into [0, C) on the ring; identity on the line.
  double Wrap(double x) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(Kind kind, double circumference)
      : kind_(kind), circumference_(circumference) {}

  Kind kind_;
  double circumference_;
};

// exp(log_coeff + rate * x) on [lo, hi). lo may be -inf and hi may be +inf on
// the line.
struct ExpSegment {
  double lo;
  double hi;
  double log_coeff;
  double rate;

  double LogValue(double x) const { return log_coeff + rate * x; }
  friend bool operator==(const ExpSegment&, const ExpSegment&) = default;
};

class PiecewiseExpDensity {
 public:
  // Validates the tiling, tail integrability, and continuity at every
  // breakpoint not listed in `jump_breakpoints`. Breakpoint i sits between
  // segment i and segment i + 1; on the ring breakpoint n - 1 is the wrap
  // from the last segment back to the first. The result need not have unit
  // mass.
  static absl::StatusOr<PiecewiseExpDensity> Create(
      Domain domain, std::vector<ExpSegment> segments,
      std::vector<size_t> jump_breakpoints = {});

  const Domain& domain() const { return domain_; }
  std::span<const ExpSegment> segments() const { return segments_; }
  std::span<const size_t> jump_breakpoints() const { return jumps_; }
  bool JumpAllowed(size_t breakpoint) const;
  double total_mass() const { return total_mass_; }
  std::span<const double> segment_masses() const { return masses_; }

  // Same shape rescaled to unit mass.
  PiecewiseExpDensity Normalized() const;

  size_t SegmentIndex(double x) const;
  double Value(double x) const;
  double LogValue(double x) const;
  // Mass over [a, b]. On the ring both ends must lie in [0, C].
  double Mass(double a, double b) const;
  // Fraction of total mass to the left of x (ring: over [0, x)).
  double Cdf(double x) const;
  // Inverse of Cdf for p in (0, 1).
  double Quantile(double p) const;
  double Sample(Rng& rng) const;

 private:
  PiecewiseExpDensity(Domain domain, std::vector<ExpSegment> segments,
                      std::vector<size_t> jumps);
  double InvertWithinSegment(size_t index, double fraction) const;

  Domain domain_;
  std::vector<ExpSegment> segments_;
  std::vector<size_t> jumps_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;  // cumulative_[i] = mass of segments < i
  double total_mass_ = 0.0;
};

// Builds a density from segments and rescales it to unit mass.
absl::StatusOr<PiecewiseExpDensity> Normalize(
    Domain domain, std::vector<ExpSegment> segments,
    std::vector<size_t> jump_breakpoints = {});

// Continuous density through (x_i, exp(log_values_i)) that is exponential
// between nodes. On the line, exponential tails with the given rates are
// attached outside [x_0, x_n]; on the ring nodes must start at 0 and end at
// C. Normalized.
absl::StatusOr<PiecewiseExpDensity> FromLogSamples(
    Domain domain, std::span<const double> xs,
    std::span<const double> log_values, double left_tail_rate = 0.0,
    double right_tail_rate = 0.0);

enum class PrivacyMetric { kGeographic, kLocal };

struct PrivacyReport {
  bool satisfied = false;
  // Max over checked pairs of log rho(x) - log rho(y) - eps * d(x, y).
  // Geographic pairs are restricted to one segment and at most unit distance
  // apart, which is enough to detect any Lipschitz violation.
  double worst_ratio_log = 0.0;
  double witness_x = 0.0;
  double witness_y = 0.0;
};

inline constexpr double kPrivacyTolerance = 1e-9;

// Analytic privacy check: geographic means |rate| <= eps on every segment and
// no jumps; local means log sup rho - log inf rho <= eps.
PrivacyReport CheckPrivacy(const PiecewiseExpDensity& density, double eps,
                           PrivacyMetric metric);

struct NearestPoint {
  size_t index;
  double distance;
};

// Nearest of `points` to x under the domain metric; ties go to the smaller
// index.
NearestPoint FindNearest(const Domain& domain, std::span<const double> points,
                         double x);

// E_{x ~ density}[min_a h(d(x, a))], normalized by total mass. Exact for the
// identity disutility; adaptive Simpson (abs tol 1e-10) with breakpoints at
// segment ends and cost kinks otherwise.
double ExpectedMinDisutility(const PiecewiseExpDensity& density,
                             const OffsetSet& offsets, const DisutilityFn& h);

// Replaces a geographically eps-private line density by the piecewise
// exponential density with rates +-eps built from its values at the
// boundaries of the full intervals of width gamma around the offsets.
// Never increases the expected identity cost when gamma is at least that
// cost.
absl::StatusOr<PiecewiseExpDensity> PieceExpProject(
    const PiecewiseExpDensity& density, const OffsetSet& offsets, double gamma,
    double eps);

struct SpaceRemovalResult {
  PiecewiseExpDensity density;
  OffsetSet offsets;
};

// Deletes [a, b) from a line density with rho(a) = rho(b), splices the two
// halves and renormalizes. Offsets left of a are kept, offsets in [a, b) move
// to a, offsets at or right of b shift left by b - a; coincident offsets are
// merged.
absl::StatusOr<SpaceRemovalResult> SpaceRemoval(
    const PiecewiseExpDensity& density, const OffsetSet& offsets, double a,
    double b);

}  // namespace msdp

#endif  // MSDP_DENSITY_H_
