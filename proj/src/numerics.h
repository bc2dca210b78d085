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

// Small numerical kernels shared by the mechanism modules.

#ifndef MSDP_NUMERICS_H_
#define MSDP_NUMERICS_H_

#include <cmath>
#include <functional>
#include <utility>

namespace msdp::numerics {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Total() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

namespace internal {

inline double SimpsonStep(const std::function<double(double)>& f, double a,
                          double fa, double b, double fb, double m, double fm,
                          double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return SimpsonStep(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         SimpsonStep(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace internal

// Adaptive Simpson quadrature of f over the finite interval [a, b].
inline double AdaptiveSimpson(const std::function<double(double)>& f, double a,
                              double b, double abs_tol = 1e-10,
                              int max_depth = 40) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return internal::SimpsonStep(f, a, fa, b, fb, m, fm, whole, abs_tol,
                               max_depth);
}

struct Minimum {
  double x;
  double value;
};

// Golden-section search on [lo, hi]. Returns the best point evaluated, which
// includes both bracket ends, so a minimum at the boundary is found exactly.
inline Minimum GoldenSection(const std::function<double(double)>& f, double lo,
                             double hi, double x_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  Minimum best{lo, f(lo)};
  const double fhi = f(hi);
  if (fhi < best.value) best = {hi, fhi};
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 500 && (b - a) > x_tol; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    if (fc < best.value) best = {c, fc};
    if (fd < best.value) best = {d, fd};
  }
  return best;
}

// Scans `points` evenly spaced abscissae over [lo, hi], then refines around
// the best by golden section within its two neighbouring cells.
inline Minimum GridThenGolden(const std::function<double(double)>& f,
                              double lo, double hi, int points, double x_tol) {
  if (points < 2) points = 2;
  const double step = (hi - lo) / (points - 1);
  int best_i = 0;
  double best_v = f(lo);
  for (int i = 1; i < points; ++i) {
    const double v = f(i == points - 1 ? hi : lo + i * step);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = best_i == 0 ? lo : lo + (best_i - 1) * step;
  const double b = best_i == points - 1 ? hi : lo + (best_i + 1) * step;
  Minimum refined = GoldenSection(f, a, b, x_tol);
  const double grid_x = best_i == points - 1 ? hi : lo + best_i * step;
  if (best_v <= refined.value) return {grid_x, best_v};
  return refined;
}

}  // namespace msdp::numerics

#endif  // MSDP_NUMERICS_H_
