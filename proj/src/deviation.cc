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

#include "stigma/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stigma/numeric.hpp"

namespace stigma {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNearStep = 1e-6;

}  // namespace

double deviation_payoff(const TypeDistribution& d, const Audience& audience,
                        double S, double price, Support support) {
  double upper = std::min(price + S, audience.band_cap);
  double mass = 0.0;
  double moment = 0.0;
  if (upper > audience.band_floor) {
    if (support == Support::kBounded) {
      upper = std::min(upper, 1.0);
      mass = d.mass(audience.band_floor, upper);
      moment = d.moment(audience.band_floor, upper);
    } else {
      mass = d.extended_mass(audience.band_floor, upper);
      moment = d.extended_moment(audience.band_floor, upper);
    }
  }
  double total = audience.base_mass + mass;
  if (!(total > 0.0)) return kNegInf;
  return (audience.base_mass * audience.base_mean + moment) / total - price;
}

DeviationScan scan_deviation(const TypeDistribution& d,
                             const Audience& audience, double S, double lo,
                             double hi, Support support, int grid_n) {
  DeviationScan scan;
  scan.lo = lo;
  scan.hi = hi;
  scan.margin = kNegInf;
  scan.score = kNegInf;
  if (!(hi > lo)) return scan;
  scan.empty = false;

  auto payoff = [&](double p) {
    return deviation_payoff(d, audience, S, p, support);
  };
  auto score = [&](double p) { return payoff(p) / (p - lo); };
  const double step = (hi - lo) / grid_n;
  const double near = lo + std::min(kNearStep, 0.5 * step);

  int best_margin = 1;
  int best_score = 0;
  scan.score = score(near);
  scan.score_at = near;
  for (int k = 1; k <= grid_n; ++k) {
    double p = k == grid_n ? hi : lo + step * k;
    double g = payoff(p);
    if (g > scan.margin) {
      scan.margin = g;
      scan.margin_at = p;
      best_margin = k;
    }
    double s = g / (p - lo);
    if (s > scan.score) {
      scan.score = s;
      scan.score_at = p;
      best_score = k;
    }
  }

  auto polish = [&](const ScalarFn& f, int k, double& value, double& at) {
    double a = std::max(near, lo + step * (k - 1));
    double b = std::min(hi, lo + step * (k + 1));
    if (!(b > a) || !std::isfinite(value)) return;
    Extremum e = golden_max(f, a, b, 1e-12);
    if (e.value > value) {
      value = e.value;
      at = e.x;
    }
  };
  polish(payoff, best_margin, scan.margin, scan.margin_at);
  polish(score, best_score, scan.score, scan.score_at);
  return scan;
}

Verdict classify(const DeviationScan& scan, double tol) {
  if (scan.empty || scan.score <= -tol) return Verdict::kDeterred;
  if (scan.score > tol) return Verdict::kProfitable;
  return Verdict::kIndeterminate;
}

}  // namespace stigma
