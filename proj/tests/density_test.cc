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
#include <numbers>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "msdp/density_json.h"
#include "msdp/line_mech.h"
#include "msdp/rng.h"
#include "oracles.h"

namespace msdp {
namespace {

using ::testing::HasSubstr;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

PiecewiseExpDensity Laplace(double eps) { return *LaplaceDensity(eps); }

PiecewiseExpDensity UniformRing() {
  return *Normalize(Domain::Ring(), {{0.0, kTwoPi, 0.0, 0.0}});
}

// Continuous line density with rates in [-eps, eps]: rising, flat, falling,
// rising, falling.
PiecewiseExpDensity Bumpy(double eps) {
  std::vector<double> xs = {-3.0, -1.0, 0.5, 1.5, 2.0, 4.0};
  std::vector<double> ls = {0.0, 2.0 * eps, 2.0 * eps, 1.2 * eps, 1.5 * eps,
                            0.0};
  return *FromLogSamples(Domain::Line(), xs, ls, eps, -eps);
}

TEST(NormalizeTest, HalvesUnitLaplaceShape) {
  absl::StatusOr<PiecewiseExpDensity> d = Normalize(
      Domain::Line(), {{-kInf, 0.0, 0.0, 1.0}, {0.0, kInf, 0.0, -1.0}});
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_NEAR(d->Value(0.0), 0.5, 1e-15);
  EXPECT_NEAR(d->total_mass(), 1.0, 1e-12);
}

TEST(NormalizeTest, ConstantOnRing) {
  const PiecewiseExpDensity d = UniformRing();
  EXPECT_NEAR(d.Value(1.0), 1.0 / kTwoPi, 1e-15);
}

TEST(NormalizeTest, SteeperLaplaceShapeHasUnitPeak) {
  absl::StatusOr<PiecewiseExpDensity> d = Normalize(
      Domain::Line(), {{-kInf, 0.0, 0.0, 2.0}, {0.0, kInf, 0.0, -2.0}});
  ASSERT_TRUE(d.ok());
  EXPECT_NEAR(d->Value(0.0), 1.0, 1e-15);
}

TEST(NormalizeTest, Idempotent) {
  const PiecewiseExpDensity d = Bumpy(1.0);
  const PiecewiseExpDensity again = d.Normalized();
  EXPECT_NEAR(again.total_mass(), 1.0, 1e-12);
  for (double x : {-5.0, -1.0, 0.7, 3.3}) {
    EXPECT_NEAR(again.Value(x), d.Value(x), 1e-15);
  }
}

TEST(NormalizeTest, RejectsGap) {
  absl::StatusOr<PiecewiseExpDensity> d = Normalize(
      Domain::Line(), {{-kInf, 0.0, 0.0, 1.0}, {0.1, kInf, 0.0, -1.0}});
  ASSERT_FALSE(d.ok());
  EXPECT_THAT(d.status().message(), HasSubstr("GapOrOverlap"));
}

TEST(NormalizeTest, RejectsOverlapOnRing) {
  absl::StatusOr<PiecewiseExpDensity> d = Normalize(
      Domain::Ring(), {{0.0, 4.0, 0.0, 0.0}, {3.0, kTwoPi, 0.0, 0.0}});
  ASSERT_FALSE(d.ok());
  EXPECT_THAT(d.status().message(), HasSubstr("GapOrOverlap"));
}

TEST(NormalizeTest, RejectsGrowingTail) {
  absl::StatusOr<PiecewiseExpDensity> d = Normalize(
      Domain::Line(), {{-kInf, 0.0, 0.0, 1.0}, {0.0, kInf, 0.0, 0.5}});
  ASSERT_FALSE(d.ok());
  EXPECT_THAT(d.status().message(), HasSubstr("NonIntegrableTail"));
}

TEST(NormalizeTest, RejectsUnflaggedJump) {
  const std::vector<ExpSegment> segs = {{0.0, 1.0, 1.0, 0.0},
                                        {1.0, kTwoPi, 0.0, 0.0}};
  EXPECT_FALSE(Normalize(Domain::Ring(), segs).ok());
  // Breakpoint 0 is between the segments, breakpoint 1 is the wrap.
  EXPECT_TRUE(Normalize(Domain::Ring(), segs, {0, 1}).ok());
}

TEST(DensityTest, CdfAndQuantileInvert) {
  for (const PiecewiseExpDensity& d : {Laplace(1.0), Bumpy(0.7), UniformRing()}) {
    for (double p : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
      EXPECT_NEAR(d.Cdf(d.Quantile(p)), p, 1e-12);
    }
  }
}

TEST(DensityTest, LaplaceCdfMatchesClosedForm) {
  const PiecewiseExpDensity d = Laplace(1.5);
  for (double x : {-4.0, -0.3, 0.0, 0.2, 3.0}) {
    const double expected = x < 0 ? 0.5 * std::exp(1.5 * x)
                                  : 1.0 - 0.5 * std::exp(-1.5 * x);
    EXPECT_NEAR(d.Cdf(x), expected, 1e-15);
  }
  EXPECT_NEAR(d.Mass(-1.0, 2.0),
              1.0 - 0.5 * std::exp(-1.5) - 0.5 * std::exp(-3.0), 1e-15);
}

TEST(DensityTest, MassAgreesWithQuadrature) {
  const PiecewiseExpDensity d = Bumpy(1.0);
  const double oracle = testing::PiecewiseSimpson(
      [&d](double x) { return d.Value(x); }, -2.5, 3.2,
      {-1.0, 0.5, 1.5, 2.0});
  EXPECT_NEAR(d.Mass(-2.5, 3.2), oracle, 1e-10);
}

TEST(ExpectedMinDisutilityTest, LaplaceSinglePoint) {
  EXPECT_NEAR(ExpectedMinDisutility(Laplace(1.0), *OffsetSet::Create({0.0}),
                                    DisutilityFn::Identity()),
              1.0, 1e-15);
}

TEST(ExpectedMinDisutilityTest, LaplaceSymmetricPair) {
  const double a = std::log(2.0);
  EXPECT_NEAR(ExpectedMinDisutility(Laplace(1.0), *OffsetSet::Create({-a, a}),
                                    DisutilityFn::Identity()),
              a - 1.0 + 2.0 * std::exp(-a), 1e-14);
}

TEST(ExpectedMinDisutilityTest, UniformRingFourPoints) {
  const OffsetSet a = *OffsetSet::Create({0.0, kPi / 2, kPi, 3 * kPi / 2});
  EXPECT_NEAR(
      ExpectedMinDisutility(UniformRing(), a, DisutilityFn::Identity()),
      kPi / 8, 1e-14);
}

TEST(ExpectedMinDisutilityTest, MatchesQuadratureForEveryDisutility) {
  const PiecewiseExpDensity d = Bumpy(1.0);
  const OffsetSet a = *OffsetSet::Create({-1.7, 0.2, 0.9, 3.1});
  const std::vector<double> av(a.values().begin(), a.values().end());
  for (const DisutilityFn& h :
       {DisutilityFn::Identity(), DisutilityFn::Sqrt(), DisutilityFn::Square()}) {
    const double oracle = testing::LineCostOracle(
        [&d](double x) { return d.Value(x); }, av,
        [&h](double t) { return h(t); }, 60.0, {-3.0, -1.0, 0.5, 1.5, 2.0, 4.0});
    EXPECT_NEAR(ExpectedMinDisutility(d, a, h), oracle, 1e-8) << h.name();
  }
}

TEST(ExpectedMinDisutilityTest, RingMatchesQuadrature) {
  const PiecewiseExpDensity d = *FromLogSamples(
      Domain::Ring(), std::vector<double>{0.0, 1.0, 3.0, 5.0, kTwoPi},
      std::vector<double>{0.0, 0.8, -0.6, 0.4, 0.0});
  const OffsetSet a = *OffsetSet::Create({0.4, 2.0, 5.9});
  for (const DisutilityFn& h : {DisutilityFn::Identity(), DisutilityFn::Sqrt()}) {
    auto f = [&](double x) {
      double m = kInf;
      for (double p : a.values()) m = std::min(m, h(testing::RingDistance(x, p)));
      return m * d.Value(x);
    };
    // Kinks: offsets, their antipodes, arc midpoints, density nodes.
    std::vector<double> breaks = {0.4, 2.0, 5.9, 1.0, 3.0, 5.0,
                                  1.2, 3.95, 0.4 + kPi, 2.0 + kPi, 5.9 - kPi,
                                  (5.9 + 0.4 + kTwoPi) / 2 - kTwoPi};
    const double oracle = testing::PiecewiseSimpson(f, 0.0, kTwoPi, breaks, 4000);
    EXPECT_NEAR(ExpectedMinDisutility(d, a, h), oracle, 1e-8) << h.name();
  }
}

TEST(ExpectedMinDisutilityTest, FarOffsetsDoNotLoseMass) {
  // Tails far from the mode exercise the anchored exponential integrals.
  const PiecewiseExpDensity d = Laplace(4.0);
  const OffsetSet a = *OffsetSet::Create({-300.0, 250.0});
  EXPECT_NEAR(ExpectedMinDisutility(d, a, DisutilityFn::Identity()), 250.0,
              1e-9);
}

TEST(SampleTest, LaplaceMeanAbsolute) {
  const PiecewiseExpDensity d = Laplace(1.0);
  Rng rng(7);
  const int n = 1000000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = std::fabs(d.Sample(rng));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, 1.0, 3.0 * se);
}

TEST(SampleTest, UniformRingKolmogorovSmirnov) {
  const PiecewiseExpDensity d = UniformRing();
  Rng rng(11);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = d.Sample(rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  const double n = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = xs[i] / kTwoPi;
    ks = std::max({ks, std::fabs(f - i / n), std::fabs(f - (i + 1) / n)});
  }
  EXPECT_LT(ks, 0.002);
}

TEST(SampleTest, SameSeedSameStream) {
  const PiecewiseExpDensity d = Bumpy(1.0);
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(d.Sample(a), d.Sample(b));
}

TEST(SampleTest, MonteCarloMatchesExactCost) {
  Rng pick(5);
  for (int trial = 0; trial < 5; ++trial) {
    const double eps = 0.5 + pick.UniformOpen();
    const PiecewiseExpDensity d = Bumpy(eps);
    std::vector<double> pts;
    for (int j = 0; j < 3; ++j) pts.push_back(pick.Uniform(-3.0, 3.0));
    const OffsetSet a = *OffsetSet::FromUnsorted(pts);
    const double exact = ExpectedMinDisutility(d, a, DisutilityFn::Identity());
    Rng rng(ChildSeed(99, trial));
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = d.Sample(rng);
      double m = kInf;
      for (double p : a.values()) m = std::min(m, std::fabs(x - p));
      sum += m;
      sq += m * m;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, exact, 4.0 * se) << "trial " << trial;
  }
}

TEST(CheckPrivacyTest, LaplaceIsTight) {
  const PrivacyReport r =
      CheckPrivacy(Laplace(1.0), 1.0, PrivacyMetric::kGeographic);
  EXPECT_TRUE(r.satisfied);
  EXPECT_NEAR(r.worst_ratio_log, 0.0, 1e-15);
}

TEST(CheckPrivacyTest, LaplaceFailsSmallerEps) {
  const PrivacyReport r =
      CheckPrivacy(Laplace(1.0), 0.5, PrivacyMetric::kGeographic);
  EXPECT_FALSE(r.satisfied);
  EXPECT_GT(r.worst_ratio_log, 0.4);
  // The witness pair realises the reported excess.
  const double excess = std::fabs(std::log(Laplace(1.0).Value(r.witness_x)) -
                                  std::log(Laplace(1.0).Value(r.witness_y))) -
                        0.5 * std::fabs(r.witness_x - r.witness_y);
  EXPECT_NEAR(excess, r.worst_ratio_log, 1e-12);
}

TEST(CheckPrivacyTest, JumpsFailGeographicButNotLocal) {
  const PiecewiseExpDensity d = *Normalize(
      Domain::Ring(), {{0.0, 1.0, 1.0, 0.0}, {1.0, kTwoPi, 0.0, 0.0}}, {0, 1});
  EXPECT_FALSE(CheckPrivacy(d, 5.0, PrivacyMetric::kGeographic).satisfied);
  const PrivacyReport local = CheckPrivacy(d, 1.0, PrivacyMetric::kLocal);
  EXPECT_TRUE(local.satisfied);
  EXPECT_NEAR(local.worst_ratio_log, 0.0, 1e-12);
  EXPECT_FALSE(CheckPrivacy(d, 0.9, PrivacyMetric::kLocal).satisfied);
}

TEST(CheckPrivacyTest, AgreesWithRandomPairs) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    // Random continuous density, sometimes steeper than eps.
    std::vector<double> xs = {-4.0};
    std::vector<double> ls = {0.0};
    for (int j = 0; j < 5; ++j) {
      xs.push_back(xs.back() + rng.Uniform(0.2, 2.0));
      ls.push_back(ls.back() + rng.Uniform(-1.3, 1.3) * (xs.back() - xs[xs.size() - 2]));
    }
    const double eps = 1.0;
    const PiecewiseExpDensity d =
        *FromLogSamples(Domain::Line(), xs, ls, eps, -eps);
    const bool analytic =
        CheckPrivacy(d, eps, PrivacyMetric::kGeographic).satisfied;
    bool sampled = true;
    for (int i = 0; i < 10000; ++i) {
      const double x = rng.Uniform(-6.0, 8.0);
      const double y = rng.Uniform(-6.0, 8.0);
      if (d.Value(x) > std::exp(eps * std::fabs(x - y)) * d.Value(y) * (1 + 1e-9)) {
        sampled = false;
      }
    }
    EXPECT_EQ(analytic, sampled) << "trial " << trial;
  }
}

TEST(FindNearestTest, TiesGoToSmallerIndex) {
  const std::vector<double> pts = {-1.0, 1.0};
  EXPECT_EQ(FindNearest(Domain::Line(), pts, 0.0).index, 0u);
  const std::vector<double> ring = {6.25, kPi};
  const NearestPoint n = FindNearest(Domain::Ring(), ring, 0.05);
  EXPECT_EQ(n.index, 0u);
  EXPECT_NEAR(n.distance, kTwoPi - 6.2, 1e-12);
}

TEST(PieceExpProjectTest, LaplaceIsFixedPoint) {
  const PiecewiseExpDensity d = Laplace(1.0);
  const OffsetSet a = *OptimalOffsetsClosed(1.0, 3);
  const double gamma = *ClosedFormCost(1.0, 3);
  absl::StatusOr<PiecewiseExpDensity> p = PieceExpProject(d, a, gamma, 1.0);
  ASSERT_TRUE(p.ok()) << p.status();
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    ASSERT_NEAR(p->Value(x), d.Value(x), 1e-9) << x;
  }
}

TEST(PieceExpProjectTest, OutputRatesAreExactlyEps) {
  const PiecewiseExpDensity d = Bumpy(1.0);
  const OffsetSet a = *OffsetSet::Create({-1.0, 1.2});
  const double gamma = ExpectedMinDisutility(d, a, DisutilityFn::Identity());
  absl::StatusOr<PiecewiseExpDensity> p = PieceExpProject(d, a, gamma, 1.0);
  ASSERT_TRUE(p.ok()) << p.status();
  for (const ExpSegment& s : p->segments()) {
    EXPECT_EQ(std::fabs(s.rate), 1.0);
  }
  EXPECT_TRUE(CheckPrivacy(*p, 1.0, PrivacyMetric::kGeographic).satisfied);
}

TEST(PieceExpProjectTest, NeverIncreasesCost) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const double eps = rng.Uniform(0.5, 2.0);
    std::vector<double> xs = {-3.0};
    std::vector<double> ls = {0.0};
    for (int j = 0; j < 4; ++j) {
      xs.push_back(xs.back() + rng.Uniform(0.3, 2.0));
      ls.push_back(ls.back() +
                   rng.Uniform(-eps, eps) * (xs.back() - xs[xs.size() - 2]));
    }
    const PiecewiseExpDensity d =
        *FromLogSamples(Domain::Line(), xs, ls, eps, -eps);
    std::vector<double> pts;
    const int k = 1 + static_cast<int>(rng.NextU64() % 4);
    for (int j = 0; j < k; ++j) pts.push_back(rng.Uniform(-3.0, 4.0));
    const OffsetSet a = *OffsetSet::FromUnsorted(pts);
    const double before = ExpectedMinDisutility(d, a, DisutilityFn::Identity());
    const double gamma = before * rng.Uniform(1.0, 1.5);
    absl::StatusOr<PiecewiseExpDensity> p = PieceExpProject(d, a, gamma, eps);
    ASSERT_TRUE(p.ok()) << p.status();
    EXPECT_LE(ExpectedMinDisutility(*p, a, DisutilityFn::Identity()),
              before + 1e-9)
        << "trial " << trial;
    EXPECT_TRUE(CheckPrivacy(*p, eps, PrivacyMetric::kGeographic).satisfied);
  }
}

TEST(PieceExpProjectTest, RejectsNonPrivateInput) {
  absl::StatusOr<PiecewiseExpDensity> p =
      PieceExpProject(Laplace(2.0), *OffsetSet::Create({0.0}), 1.0, 1.0);
  ASSERT_FALSE(p.ok());
  EXPECT_EQ(p.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(p.status().message(), HasSubstr("PrivacyViolated"));
}

TEST(SpaceRemovalTest, MapsOffsets) {
  // Flat region makes rho(0) = rho(1).
  const PiecewiseExpDensity d = *FromLogSamples(
      Domain::Line(), std::vector<double>{-1.0, 2.0},
      std::vector<double>{0.0, 0.0}, 1.0, -1.0);
  absl::StatusOr<SpaceRemovalResult> r =
      SpaceRemoval(d, *OffsetSet::Create({-1.0, 0.5, 2.0}), 0.0, 1.0);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_THAT(std::vector<double>(r->offsets.values().begin(),
                                  r->offsets.values().end()),
              ::testing::ElementsAre(-1.0, 0.0, 1.0));
  EXPECT_NEAR(r->density.total_mass(), 1.0, 1e-12);
  // Mass left of the cut scales by 1 / (1 - removed mass).
  const double removed = d.Mass(0.0, 1.0);
  EXPECT_NEAR(r->density.Mass(-kInf, 0.0), d.Mass(-kInf, 0.0) / (1 - removed),
              1e-12);
}

TEST(SpaceRemovalTest, TinyIntervalIsIdentity) {
  const PiecewiseExpDensity d = Laplace(1.0);
  const OffsetSet a = *OffsetSet::Create({-2.0, 0.7});
  absl::StatusOr<SpaceRemovalResult> r = SpaceRemoval(d, a, -1e-13, 1e-13);
  ASSERT_TRUE(r.ok()) << r.status();
  for (double x : {-3.0, -0.5, 0.5, 2.0}) {
    EXPECT_NEAR(r->density.Value(x), d.Value(x), 1e-12);
  }
  EXPECT_NEAR(r->offsets[0], -2.0, 1e-12);
  EXPECT_NEAR(r->offsets[1], 0.7, 1e-12);
}

TEST(SpaceRemovalTest, RemovingAValleyDoesNotIncreaseCost) {
  // Two Laplace-like bumps around +-3 with a valley at 0.
  const double eps = 1.0;
  const PiecewiseExpDensity d = *FromLogSamples(
      Domain::Line(), std::vector<double>{-3.0, 0.0, 3.0},
      std::vector<double>{0.0, -3.0, 0.0}, eps, -eps);
  const OffsetSet a = *OffsetSet::Create({-3.0, 3.0});
  const double gamma = ExpectedMinDisutility(d, a, DisutilityFn::Identity());
  // Symmetric around the valley, and every point inside is farther than
  // gamma from both offsets.
  const double w = 3.0 - gamma - 0.1;
  absl::StatusOr<SpaceRemovalResult> r = SpaceRemoval(d, a, -w, w);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_LE(ExpectedMinDisutility(r->density, r->offsets,
                                  DisutilityFn::Identity()),
            gamma + 1e-12);
  EXPECT_TRUE(CheckPrivacy(r->density, eps, PrivacyMetric::kGeographic).satisfied);
}

TEST(SpaceRemovalTest, RejectsMismatchedEnds) {
  absl::StatusOr<SpaceRemovalResult> r =
      SpaceRemoval(Laplace(1.0), *OffsetSet::Create({0.0}), 0.0, 1.0);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(r.status().message(), HasSubstr("EndpointMismatch"));
}

TEST(DensityJsonTest, RoundTripIsExact) {
  for (const PiecewiseExpDensity& d :
       {Laplace(0.3), Bumpy(1.1),
        *Normalize(Domain::Ring(),
                   {{0.0, 1.0, 1.0, 0.0}, {1.0, kTwoPi, 0.0, 0.0}}, {0, 1})}) {
    const std::string text = DensityToJson(d);
    absl::StatusOr<PiecewiseExpDensity> back = DensityFromJson(text);
    ASSERT_TRUE(back.ok()) << back.status() << "\n" << text;
    ASSERT_EQ(back->segments().size(), d.segments().size());
    for (size_t i = 0; i < d.segments().size(); ++i) {
      EXPECT_EQ(back->segments()[i], d.segments()[i]);
    }
    EXPECT_EQ(back->domain(), d.domain());
    EXPECT_EQ(DensityToJson(*back), text);
  }
}

TEST(DensityJsonTest, EncodesInfinitiesAsStrings) {
  const std::string text = DensityToJson(Laplace(1.0));
  EXPECT_THAT(text, HasSubstr("\"-inf\""));
  EXPECT_THAT(text, HasSubstr("\"+inf\""));
}

TEST(DensityJsonTest, RejectsGarbage) {
  EXPECT_FALSE(DensityFromJson("{").ok());
  EXPECT_FALSE(DensityFromJson("{\"domain\":{\"kind\":\"plane\"}}").ok());
}

}  // namespace
}  // namespace msdp
