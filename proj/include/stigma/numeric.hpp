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

#ifndef STIGMA_NUMERIC_HPP_
#define STIGMA_NUMERIC_HPP_

#include <functional>
#include <vector>

namespace stigma {

using ScalarFn = std::function<double(double)>;

// Root of f on [lo, hi] by bisection. f(lo) and f(hi) must have opposite
// signs (a zero at either end is returned directly). Stops when the bracket
// is narrower than tol. Throws NumericError if the bracket is invalid or
// max_iter is exhausted.
double bisect(const ScalarFn& f, double lo, double hi, double tol = 1e-12,
              int max_iter = 400);

// Bisection on a predicate with ok(lo) true and ok(hi) false; hi may lie on
// either side of lo. Returns the last point known to satisfy ok once the
// bracket is narrower than tol.
double bisect_predicate(const std::function<bool(double)>& ok, double lo,
                        double hi, double tol);

struct Extremum {
  double x;
  double value;
};

// Golden-section maximization of f on [lo, hi].
Extremum golden_max(const ScalarFn& f, double lo, double hi,
                    double tol = 1e-10, int max_iter = 200);

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
// The range is first split into `pieces` equal parts so that kinks cannot
// hide from the error estimate.
double integrate(const ScalarFn& f, double a, double b, double tol = 1e-10,
                 int pieces = 1);

// Every root of f on [lo, hi], located by scanning n equal cells for sign
// changes and bisecting each one.
std::vector<double> all_roots(const ScalarFn& f, double lo, double hi, int n,
                              double tol = 1e-12);

}  // namespace stigma

#endif  // STIGMA_NUMERIC_HPP_
