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
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace msdp {
namespace {

using ::testing::HasSubstr;

constexpr double kPi = std::numbers::pi;

double Cost(const PiecewiseExpDensity& d, const OffsetSet& a) {
  return ExpectedMinDisutility(d, a, DisutilityFn::Identity());
}

TEST(LocalRingTest, BetaFormsAgree) {
  for (double eps : {0.01, 0.25, 1.0, 4.0, 30.0}) {
    EXPECT_NEAR(LocalRingBeta(eps),
                std::expm1(eps / 2) / (2.0 * std::expm1(eps)), 1e-15)
        << eps;
  }
}

TEST(LocalRingTest, FiveResults) {
  absl::StatusOr<LocalRingResult> r = LocalRingMechanism(1.0, 5);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_NEAR(r->cost, testing::LocalRingCostFormula(1.0, 5), 1e-15);
  EXPECT_NEAR(r->cost, 0.237216, 1e-6);
  EXPECT_NEAR(r->mechanism.beta, 0.188772, 5e-6);
  EXPECT_NEAR(r->mechanism.cell, 2 * kPi / 5, 1e-15);
  EXPECT_EQ(r->mechanism.offsets.size(), 5u);
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(r->mechanism.offsets[j], j * 2 * kPi / 5, 1e-15);
  }
}

TEST(LocalRingTest, LargeEpsLimit) {
  EXPECT_LT(LocalRingBeta(20.0), 2.3e-5);
  EXPECT_LT(LocalRingMechanism(20.0, 1)->cost, 1.5e-4);
}

TEST(LocalRingTest, SingleResult) {
  absl::StatusOr<LocalRingResult> r = LocalRingMechanism(1.0, 1);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->cost, 1.186, 1e-3);
  EXPECT_THAT(std::vector<double>(r->mechanism.offsets.values().begin(),
                                  r->mechanism.offsets.values().end()),
              ::testing::ElementsAre(0.0));
}

TEST(LocalRingTest, RejectsZeroK) {
  absl::StatusOr<LocalRingResult> r = LocalRingMechanism(1.0, 0);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(r.status().message(), HasSubstr("InvalidK"));
}

TEST(LocalRingTest, ExactCostMatchesFormula) {
  for (double eps : {0.25, 1.0, 4.0}) {
    for (int k = 1; k <= 32; ++k) {
      const LocalRingResult r = *LocalRingMechanism(eps, k);
      EXPECT_NEAR(Cost(r.mechanism.density, r.mechanism.offsets),
                  testing::LocalRingCostFormula(eps, k), 1e-9)
          << "eps " << eps << " k " << k;
    }
  }
}

// Independent construction: value alpha e^eps within beta t of a multiple of
// t, alpha elsewhere, alpha fixed by unit mass.
TEST(LocalRingTest, MatchesQuadratureOracle) {
  for (double eps : {0.25, 1.0, 4.0}) {
    for (int k : {1, 2, 3, 7}) {
      const double t = 2 * kPi / k;
      const double beta = 1.0 / (2.0 * (std::exp(eps / 2) + 1.0));
      const double alpha = 1.0 / (2 * kPi * (1 - 2 * beta) +
                                  2 * kPi * 2 * beta * std::exp(eps));
      auto rho = [&](double x) {
        const double r = std::fmod(x, t);
        const double d = std::min(r, t - r);
        return d <= beta * t ? alpha * std::exp(eps) : alpha;
      };
      std::vector<double> breaks;
      for (int j = 0; j <= k; ++j) {
        breaks.push_back(j * t);
        breaks.push_back(j * t + beta * t);
        breaks.push_back(j * t - beta * t);
        breaks.push_back(j * t + t / 2);
      }
      auto f = [&](double x) {
        const double r = std::fmod(x, t);
        return std::min(r, t - r) * rho(x);
      };
      const double oracle =
          testing::PiecewiseSimpson(f, 0.0, 2 * kPi, breaks, 200);
      EXPECT_NEAR(LocalRingMechanism(eps, k)->cost, oracle, 1e-10);
    }
  }
}

TEST(LocalRingTest, RatioIsExactlyEExpEps) {
  for (double eps : {0.25, 1.0, 4.0}) {
    for (int k : {1, 4, 32}) {
      const PiecewiseExpDensity& d = LocalRingMechanism(eps, k)->mechanism.density;
      double hi = 0.0;
      double lo = 1e300;
      for (const ExpSegment& s : d.segments()) {
        EXPECT_EQ(s.rate, 0.0);
        hi = std::max(hi, d.Value(0.5 * (s.lo + s.hi)));
        lo = std::min(lo, d.Value(0.5 * (s.lo + s.hi)));
      }
      EXPECT_NEAR(hi / lo, std::exp(eps), 1e-12 * std::exp(eps));
      const PrivacyReport local = CheckPrivacy(d, eps, PrivacyMetric::kLocal);
      EXPECT_TRUE(local.satisfied);
      EXPECT_NEAR(local.worst_ratio_log, 0.0, 1e-12);
    }
  }
}

TEST(LocalRingTest, PerturbationsIncreaseCost) {
  for (double eps : {0.25, 1.0, 4.0}) {
    for (int k : {1, 2, 5}) {
      const LocalRingResult r = *LocalRingMechanism(eps, k);
      const double base = Cost(r.mechanism.density, r.mechanism.offsets);
      for (double factor : {0.9, 1.1}) {
        const PiecewiseExpDensity d =
            *LocalRingDensity(eps, k, factor * r.mechanism.beta);
        EXPECT_GT(Cost(d, r.mechanism.offsets), base) << factor;
      }
      for (size_t i = 0; i < r.mechanism.offsets.size(); ++i) {
        for (double sign : {-1.0, 1.0}) {
          std::vector<double> moved(r.mechanism.offsets.values().begin(),
                                    r.mechanism.offsets.values().end());
          moved[i] = Domain::Ring().Wrap(moved[i] + sign * 0.1 * r.mechanism.cell);
          EXPECT_GT(Cost(r.mechanism.density, *OffsetSet::FromUnsorted(moved)),
                    base);
        }
      }
    }
  }
}

TEST(GeoRingTest, FamilyIsGeographicallyPrivate) {
  for (double eps : {0.375, 1.0, 3.0}) {
    for (double t : {0.0, 0.3, kPi / 2, 2.9, kPi}) {
      absl::StatusOr<PiecewiseExpDensity> d = GeoRingDensityK2(eps, t);
      ASSERT_TRUE(d.ok()) << d.status();
      EXPECT_TRUE(CheckPrivacy(*d, eps, PrivacyMetric::kGeographic).satisfied);
      // Mirror symmetry about pi.
      for (double x : {0.1, 1.0, 2.5}) {
        EXPECT_NEAR(d->Value(x), d->Value(2 * kPi - x), 1e-12 * d->Value(x));
      }
    }
  }
}

// Reference cost of the family member at t: density built pointwise, median
// found by bisection on a quadrature CDF, cost by quadrature.
double GeoCostOracle(double eps, double t) {
  auto shape = [&](double x) {
    const double y = x <= kPi ? x : 2 * kPi - x;
    return y < t ? std::exp(eps * y) : std::exp(eps * (2 * t - y));
  };
  const std::vector<double> nodes = {t, kPi, 2 * kPi - t};
  const double mass = testing::PiecewiseSimpson(shape, 0.0, 2 * kPi, nodes, 400);
  auto cdf = [&](double x) {
    return testing::PiecewiseSimpson(shape, 0.0, x, {t}, 400) / mass;
  };
  double lo = 0.0;
  double hi = kPi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < 0.25 ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  auto f = [&](double x) {
    return std::min(testing::RingDistance(x, a),
                    testing::RingDistance(x, 2 * kPi - a)) *
           shape(x) / mass;
  };
  return testing::PiecewiseSimpson(
      f, 0.0, 2 * kPi, {t, kPi, 2 * kPi - t, a, 2 * kPi - a, a + kPi, kPi - a},
      400);
}

TEST(GeoRingTest, CostMatchesOracle) {
  for (double eps : {0.375, 1.0}) {
    for (double t : {0.0, 0.5, kPi / 2, 2.5}) {
      EXPECT_NEAR(*GeoRingCostK2(eps, t), GeoCostOracle(eps, t), 1e-8)
          << "eps " << eps << " t " << t;
    }
  }
}

TEST(GeoRingTest, OptimumAtThreeEighths) {
  absl::StatusOr<GeoRingResult> r = GeoRingOptimizeK2(0.375, 512);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_NEAR(r->t_star, kPi / 2, 0.01);
  EXPECT_NEAR(r->cost, 0.72, 0.02);
  ASSERT_EQ(r->offsets.size(), 2u);
  EXPECT_GT(r->offsets[0], 0.0);
  EXPECT_LT(r->offsets[0], kPi);
  EXPECT_NEAR(r->offsets[0] + r->offsets[1], 2 * kPi, 1e-12);
  EXPECT_TRUE(CheckPrivacy(r->density, 0.375, PrivacyMetric::kGeographic).satisfied);

  const double laplace = *GeoRingLaplaceCostK2(0.375);
  EXPECT_NEAR(laplace, 0.75, 0.02);
  EXPECT_GE(laplace - r->cost, 0.01);
}

TEST(GeoRingTest, NeverWorseThanLaplace) {
  for (double eps : {0.2, 1.0, 2.0}) {
    EXPECT_LE(GeoRingOptimizeK2(eps, 128)->cost,
              *GeoRingLaplaceCostK2(eps) + 1e-9);
  }
}

TEST(GeoRingTest, SmallEpsApproachesUniform) {
  // Two antipodal points on the uniform ring cost pi / 4.
  const OffsetSet a = *OffsetSet::Create({kPi / 2, 3 * kPi / 2});
  const PiecewiseExpDensity uniform =
      *Normalize(Domain::Ring(), {{0.0, 2 * kPi, 0.0, 0.0}});
  EXPECT_NEAR(Cost(uniform, a), kPi / 4, 1e-14);
  EXPECT_NEAR(*GeoRingLaplaceCostK2(1e-6), kPi / 4, 1e-5);
}

TEST(GeoRingTest, ThreadCountDoesNotChangeResult) {
  const GeoRingResult one = *GeoRingOptimizeK2(0.375, 256, 1);
  const GeoRingResult four = *GeoRingOptimizeK2(0.375, 256, 4);
  EXPECT_EQ(one.t_star, four.t_star);
  EXPECT_EQ(one.cost, four.cost);
  EXPECT_EQ(one.offsets, four.offsets);
}

TEST(GeoRingTest, RejectsSmallGrid) {
  EXPECT_FALSE(GeoRingOptimizeK2(1.0, 10).ok());
}

TEST(DensityCsvTest, HeaderAndRows) {
  const std::string csv = DensityCsv(LocalRingMechanism(1.0, 3)->mechanism.density);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,rho");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 1024);
}

}  // namespace
}  // namespace msdp
