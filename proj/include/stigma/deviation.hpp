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

#ifndef STIGMA_DEVIATION_HPP_
#define STIGMA_DEVIATION_HPP_

#include "stigma/dist.hpp"

namespace stigma {

// How a deviation pool treats types the offer would attract above theta = 1.
// kBounded stops at the top of the support. kContinued extends the density at
// its value f(1) and lets the recipients' band run to p_g + S uncapped.
enum class Support { kBounded, kContinued };

// The sellers a period-2 buyer can attract with an off-path offer p': the
// on-path sellers of the audience (base_mass at base_mean) plus every type in
// (band_floor, min(p' + S, band_cap)].
struct Audience {
  double base_mass = 0.0;
  double base_mean = 0.0;
  double band_floor = 0.0;
  double band_cap = 1.0;
};

// Pooled mean of the attracted sellers minus p'. Minus infinity when nobody
// is attracted.
double deviation_payoff(const TypeDistribution& d, const Audience& audience,
                        double S, double price, Support support);

struct DeviationScan {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;  // (lo, hi] contains no price
  // Supremum of the payoff over the grid, polished by golden section.
  double margin = 0.0;
  double margin_at = 0.0;
  // Supremum of payoff / (p' - lo). The payoff itself vanishes at lo for
  // pools whose base is priced at lo, so its sign is decided by this slope.
  double score = 0.0;
  double score_at = 0.0;
};

// Scans p' over (lo, hi] on grid_n equal steps plus a point just above lo.
DeviationScan scan_deviation(const TypeDistribution& d,
                             const Audience& audience, double S, double lo,
                             double hi, Support support, int grid_n = 512);

enum class Verdict { kDeterred, kIndeterminate, kProfitable };

// Deterred when score <= -tol, profitable when score > tol.
Verdict classify(const DeviationScan& scan, double tol = 1e-7);

}  // namespace stigma

#endif  // STIGMA_DEVIATION_HPP_
