// Copyright 2026 The Stigma Authors
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

#include "stigma/numeric.hpp"

#include <cmath>
#include <string>

#include "stigma/errors.hpp"

namespace stigma {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;

double simpson_step(const ScalarFn& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol,
                   int depth) {
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double bisect(const ScalarFn& f, double lo, double hi, double tol,
              int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::isnan(flo) || std::isnan(fhi) || (flo > 0) == (fhi > 0)) {
    throw NumericError("bisection: endpoints do not bracket a root", lo, hi);
  }
  for (int i = 0; i < max_iter; ++i) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol || mid == lo || mid == hi) return mid;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw NumericError("bisection: iteration limit reached", lo, hi);
}

double bisect_predicate(const std::function<bool(double)>& ok, double lo,
                       double hi, double tol) {
  while (std::fabs(hi - lo) > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Extremum golden_max(const ScalarFn& f, double lo, double hi, double tol,
                   int max_iter) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

double integrate(const ScalarFn& f, double a, double b, double tol,
                 int pieces) {
  if (b <= a) return 0.0;
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    double lo = a + (b - a) * k / pieces;
    double hi = k + 1 == pieces ? b : a + (b - a) * (k + 1) / pieces;
    double flo = f(lo);
    double fhi = f(hi);
    double m = 0.5 * (lo + hi);
    double fm = f(m);
    double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += simpson_step(f, lo, flo, hi, fhi, m, fm, whole, tol / pieces, 48);
  }
  return total;
}

std::vector<double> all_roots(const ScalarFn& f, double lo, double hi, int n,
                             double tol) {
  std::vector<double> roots;
  double x0 = lo;
  double f0 = f(x0);
  for (int k = 1; k <= n; ++k) {
    double x1 = lo + (hi - lo) * k / n;
    double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f1 != 0.0 && (f0 > 0) != (f1 > 0)) {
      roots.push_back(bisect(f, x0, x1, tol));
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) roots.push_back(x0);
  return roots;
}

}  // namespace stigma
