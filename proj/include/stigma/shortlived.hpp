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

#ifndef STIGMA_SHORTLIVED_HPP_
#define STIGMA_SHORTLIVED_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stigma/benchmark.hpp"
#include "stigma/deviation.hpp"
#include "stigma/dist.hpp"

namespace stigma {

struct SlOptions {
  int grid_n = 512;            // theta_hat grid on (0, theta0)
  int deviation_grid_n = 512;  // price grid per no-deviation scan
  double tol = 1e-7;           // strictness band for the margins
  Support support = Support::kContinued;
};

// Short-lived stimulation: types up to theta_hat sell in both periods (a
// fraction mu_g of them to the government), types in (theta_hat,
// theta_hat_g] take the bailout and then hold, types above never sell.
struct ShortLivedEquilibrium {
  double p_g = 0.0;
  double theta_hat = 0.0;
  double theta_hat_g = 0.0;
  double mu_g = 0.0;
  double mean_g = 0.0;  // recipients' period-2 price
  double mean_m = 0.0;  // market price in both periods
  double stigma = 0.0;  // mean_m - mean_g
  double volume = 0.0;  // F(theta_hat) + F(theta_hat_g)
  // Suprema of the two buyer deviation payoffs and their slope scores.
  double nodev_margin_recipients = 0.0;
  double nodev_margin_holdouts = 0.0;
  double nodev_score_recipients = 0.0;
  double nodev_score_holdouts = 0.0;
};

struct SlCandidate {
  std::optional<ShortLivedEquilibrium> candidate;  // margins not yet filled
  std::string violated;   // first failing constraint, empty when feasible
  double violation = 0.0;  // its size
};

// Candidate implied by theta_hat through the arbitrage and indifference
// conditions. Requires p_g > p0 and theta_hat in (0, theta0).
SlCandidate sl_candidate(const TypeDistribution& d,
                         const MarketPrimitives& prim, double theta_hat);

struct SlScans {
  DeviationScan recipients;  // p' in (mean_g, p_g]
  DeviationScan holdouts;    // p' in (p_g, 1]
};

SlScans sl_nodev_check(const TypeDistribution& d, const MarketPrimitives& prim,
                       const ShortLivedEquilibrium& cand,
                       const SlOptions& opts = {});

struct ShortLivedSet {
  std::vector<ShortLivedEquilibrium> members;  // sorted by theta_hat
  int indeterminate = 0;  // grid points left unresolved by the margin band
  bool empty() const { return members.empty(); }
  double theta_hat_min() const { return members.front().theta_hat; }
  double theta_hat_max() const { return members.back().theta_hat; }
};

// All supported theta_hat on the grid, with the ends of each supported run
// refined by bisection. Requires p_g > p0 and grid_n >= 64.
ShortLivedSet sl_solve(const TypeDistribution& d, const MarketPrimitives& prim,
                       const SlOptions& opts = {});

// Necessary bound 2 theta0 - p0 on p_g. Requires theta0 in (0, 1).
double sl_existence_bound(const TypeDistribution& d, double S, double I);

// Largest p_g with a nonempty sl_solve, located by a coarse scan between p0
// and sl_existence_bound and then bisection to tol. Empty when no scanned
// price supports an equilibrium.
std::optional<double> sl_boundary(const TypeDistribution& d, double S,
                                  double I, double tol = 1e-4,
                                  const SlOptions& opts = {});

}  // namespace stigma

#endif  // STIGMA_SHORTLIVED_HPP_
