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

#include "msdp/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "absl/strings/str_format.h"
#include "msdp/rng.h"
#include "numerics.h"
#include "parallel.h"

namespace msdp {
namespace {

constexpr int64_t kBatchSize = 1 << 16;

struct Start {
  double cost = std::numeric_limits<double>::infinity();
  double initial_cost = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

class Descent {
 public:
  Descent(const PiecewiseExpDensity& density, const DisutilityFn& h,
          const SearchBudget& budget)
      : density_(density), h_(h), budget_(budget) {
    const Domain& dom = density.domain();
    scale_ = dom.is_ring() ? dom.circumference()
                           : density.Quantile(0.99) - density.Quantile(0.01);
  }

  double Cost(const std::vector<double>& x) const {
    std::vector<double> wrapped(x);
    for (double& a : wrapped) a = density_.domain().Wrap(a);
    absl::StatusOr<OffsetSet> set = OffsetSet::FromUnsorted(std::move(wrapped));
    if (!set.ok()) return std::numeric_limits<double>::infinity();
    return ExpectedMinDisutility(density_, *set, h_);
  }

  Start Run(std::vector<double> x) const {
    const Domain& dom = density_.domain();
    const size_t k = x.size();
    std::sort(x.begin(), x.end());
    Start out;
    out.initial_cost = Cost(x);
    double cost = out.initial_cost;
    const double x_tol = 1e-10 * std::max(1.0, scale_);
    for (int sweep = 0; sweep < budget_.refine_iters; ++sweep) {
      bool improved = false;
      for (size_t i = 0; i < k; ++i) {
        double lo;
        double hi;
        if (dom.is_ring()) {
          const double c = dom.circumference();
          if (k == 1) {
            lo = x[0] - c / 2;
            hi = x[0] + c / 2;
          } else {
            lo = i > 0 ? x[i - 1] : x[k - 1] - c;
            hi = i + 1 < k ? x[i + 1] : x[0] + c;
          }
        } else {
          lo = i > 0 ? x[i - 1] : x[i] - scale_;
          hi = i + 1 < k ? x[i + 1] : x[i] + scale_;
        }
        std::vector<double> trial(x);
        auto f = [&](double y) {
          trial[i] = y;
          return Cost(trial);
        };
        const numerics::Minimum m = numerics::GridThenGolden(
            f, lo, hi, budget_.grid_points, x_tol);
        if (m.value < cost - 1e-15 * std::max(1.0, cost)) {
          x[i] = m.x;
          cost = m.value;
          improved = true;
        }
      }
      if (dom.is_ring()) {
        for (double& a : x) a = dom.Wrap(a);
        std::sort(x.begin(), x.end());
      }
      if (!improved) break;
    }
    out.cost = cost;
    out.x = std::move(x);
    return out;
  }

 private:
  const PiecewiseExpDensity& density_;
  const DisutilityFn& h_;
  const SearchBudget& budget_;
  double scale_;
};

}  // namespace

absl::Status SearchBudget::Validate() const {
  if (grid_points < 2 || refine_iters < 1 || restarts < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "budget fields must be positive (grid_points >= 2): %d, %d, %d",
        grid_points, refine_iters, restarts));
  }
  return absl::OkStatus();
}

absl::StatusOr<BruteForceResult> BruteForceOffsets(
    const PiecewiseExpDensity& density, int k, const DisutilityFn& h,
    const SearchBudget& budget, const BruteForceOptions& options) {
  if (absl::Status s = budget.Validate(); !s.ok()) return s;
  if (k < 1 || k > 7) {
    return absl::InvalidArgumentError(
        absl::StrFormat("InvalidK: brute force supports 1 <= k <= 7, got %d", k));
  }
  if (options.candidate.has_value() &&
      options.candidate->size() != static_cast<size_t>(k)) {
    return absl::InvalidArgumentError("candidate size differs from k");
  }
  const Descent descent(density, h, budget);
  std::vector<Start> results(budget.restarts);
  internal::ParallelFor(budget.restarts, options.threads, [&](int64_t r) {
    std::vector<double> x;
    if (r == 0 && options.candidate.has_value()) {
      x.assign(options.candidate->values().begin(),
               options.candidate->values().end());
    } else {
      Rng rng(ChildSeed(budget.seed, static_cast<uint64_t>(r)));
      for (int j = 0; j < k; ++j) {
        x.push_back(density.domain().is_ring()
                        ? rng.Uniform(0.0, density.domain().circumference())
                        : density.Quantile(rng.UniformOpen()));
      }
    }
    results[r] = descent.Run(std::move(x));
  });

  int best = 0;
  bool any_descent = false;
  for (int r = 0; r < budget.restarts; ++r) {
    if (results[r].cost < results[best].cost) best = r;
    if (results[r].cost < results[r].initial_cost) any_descent = true;
  }
  std::vector<double> x = results[best].x;
  for (double& a : x) a = density.domain().Wrap(a);
  absl::StatusOr<OffsetSet> offsets = OffsetSet::FromUnsorted(std::move(x));
  if (!offsets.ok()) return offsets.status();
  return BruteForceResult{*std::move(offsets), results[best].cost, best,
                          !any_descent};
}

absl::StatusOr<CostEstimate> McCost(const MechanismConfig& mech, int64_t n,
                                    uint64_t seed, double user_value,
                                    int threads) {
  if (n < 1000) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n must be at least 1000, got %d", n));
  }
  const Domain& dom = mech.domain();
  const double u = dom.Wrap(user_value);
  const int64_t batches = (n + kBatchSize - 1) / kBatchSize;
  std::vector<double> sums(batches);
  std::vector<double> squares(batches);
  internal::ParallelFor(batches, threads, [&](int64_t b) {
    Rng rng(ChildSeed(seed, static_cast<uint64_t>(b)));
    const int64_t count = std::min(kBatchSize, n - b * kBatchSize);
    numerics::CompensatedSum sum;
    numerics::CompensatedSum sq;
    for (int64_t i = 0; i < count; ++i) {
      const double signal = dom.Wrap(u + mech.noise.Sample(rng));
      double best = std::numeric_limits<double>::infinity();
      for (double a : mech.offsets.values()) {
        best = std::min(best, mech.h(dom.Distance(u, dom.Wrap(signal + a))));
      }
      sum.Add(best);
      sq.Add(best * best);
    }
    sums[b] = sum.Total();
    squares[b] = sq.Total();
  });
  numerics::CompensatedSum sum;
  numerics::CompensatedSum sq;
  for (int64_t b = 0; b < batches; ++b) {
    sum.Add(sums[b]);
    sq.Add(squares[b]);
  }
  const double nd = static_cast<double>(n);
  const double mean = sum.Total() / nd;
  const double var =
      std::max(0.0, (sq.Total() - nd * mean * mean) / (nd - 1.0));
  return CostEstimate{mean, std::sqrt(var / nd), n};
}

}  // namespace msdp
