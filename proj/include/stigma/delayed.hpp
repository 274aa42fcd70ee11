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

#ifndef STIGMA_DELAYED_HPP_
#define STIGMA_DELAYED_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stigma/benchmark.hpp"
#include "stigma/deviation.hpp"
#include "stigma/dist.hpp"

namespace stigma {

struct DsOptions {
  int grid_n = 128;            // theta_hat_g grid on [theta0, theta2)
  int mu_grid_n = 64;          // mu_g grid on (0, 1]
  int deviation_grid_n = 512;  // price grid per no-deviation scan
  double tol = 1e-7;           // strictness band for the margins
  double breakeven_tol = 1e-9;
};

// Delayed stimulation: types up to theta0 sell in both periods (a fraction
// mu_g to the government), types in (theta0, theta_hat_g] take the bailout
// and hold, types in (theta_hat_g, theta2] hold and sell at p_g in period 2.
struct DelayedEquilibrium {
  double p_g = 0.0;
  double theta_hat = 0.0;  // theta0
  double theta_hat_g = 0.0;
  double theta2 = 0.0;
  double mu_g = 0.0;
  double price_m_t1 = 0.0;           // p0
  double price_recipients_t2 = 0.0;  // p0
  double price_holdouts_t2 = 0.0;    // p_g
  double volume = 0.0;               // F(theta2) + F(theta0)
  // Non-recipient period-2 pool mean minus p_g; zero when buyers break even.
  double breakeven_residual = 0.0;
  double nodev_margin_recipients = 0.0;
  double nodev_margin_holdouts = 0.0;
  double nodev_score_recipients = 0.0;
  double nodev_score_holdouts = 0.0;
};

struct DsCandidate {
  std::optional<DelayedEquilibrium> equilibrium;  // set when accepted
  DelayedEquilibrium evaluated;                   // always filled
  std::string rejected;  // reason when not accepted
};

// Largest x in (a, 1] with x - S <= trunc_mean(a, x). Requires a in [0, 1).
double gamma(const TypeDistribution& d, double S, double a);

// Share mu_g at which period-2 non-recipient buyers break even at p_g, given
// theta_hat_g. May fall outside (0, 1].
double ds_breakeven_mu(const TypeDistribution& d, const MarketPrimitives& prim,
                       double theta_hat_g);

// Requires p_g > p0 with theta0 > 0, theta_hat_g in [theta0, theta2) and mu_g
// in (0, 1]. Accepts when buyers break even and both deviation scans deter.
DsCandidate ds_candidate(const TypeDistribution& d,
                         const MarketPrimitives& prim, double theta_hat_g,
                         double mu_g, const DsOptions& opts = {});

struct DelayedSet {
  std::vector<DelayedEquilibrium> members;  // sorted by (theta_hat_g, mu_g)
  bool empty() const { return members.empty(); }
  double theta_hat_g_min() const;
  double theta_hat_g_max() const;
};

// Members of the break-even curve: mu_g derived on the theta_hat_g grid and
// theta_hat_g solved on the mu_g grid. Empty when p_g <= p0.
DelayedSet ds_solve(const TypeDistribution& d, const MarketPrimitives& prim,
                    const DsOptions& opts = {});

// trunc_mean(theta0, gamma(theta0)).
double ds_sufficiency_threshold(const TypeDistribution& d, double S, double I);

// The mu_g = 1 equilibrium with p_g = trunc_mean(theta_hat_g,
// gamma(theta_hat_g)) when p_g reaches the sufficiency threshold; empty
// otherwise, which says nothing about existence.
std::optional<DelayedEquilibrium> ds_exists_sufficient(
    const TypeDistribution& d, const MarketPrimitives& prim,
    const DsOptions& opts = {});

enum class EquilibriumKind { kShortLived, kDelayed };

struct EquilibriumClass {
  EquilibriumKind kind = EquilibriumKind::kShortLived;
  double theta_hat = 0.0;
  double theta_hat_g = 0.0;
  double theta2 = 0.0;
};

// Requires 0 <= theta_hat <= theta_hat_g <= theta2 <= 1. theta_hat = 0 is
// accepted only for the full-freeze outcome, tagged delayed.
EquilibriumClass classify(double theta_hat, double theta_hat_g, double theta2,
                          bool full_freeze = false, double tol = 1e-9);

}  // namespace stigma

#endif  // STIGMA_DELAYED_HPP_
