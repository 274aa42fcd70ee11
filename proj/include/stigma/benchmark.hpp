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

#ifndef STIGMA_BENCHMARK_HPP_
#define STIGMA_BENCHMARK_HPP_

#include <optional>

#include "stigma/dist.hpp"

namespace stigma {

// Strict inequalities between prices (p_g > p0 and the like) are tested with
// this slack so that exact ties computed by root finding count as ties.
inline constexpr double kPriceSlack = 1e-9;

struct MarketPrimitives {
  double S = 0.0;       // net project surplus
  double I = 0.0;       // funding requirement
  double lambda = 0.0;  // deadweight cost per unit of public funds
  double p_g = 0.0;     // government purchase price

  // Throws DomainError unless S > 0, I > 0, lambda >= 0, all finite.
  void validate() const;
};

struct LaissezFaireOutcome {
  double theta0 = 0.0;  // marginal seller
  double p0 = 0.0;      // market price, lower_mean(theta0); 0 when frozen
  bool frozen = false;
  // Fixed point before the funding check. Equal to (theta0, p0) unless frozen.
  double candidate_theta0 = 0.0;
  double candidate_p0 = 0.0;
};

// theta0 - S = lower_mean(theta0) by bisection on [0, 1] (tolerance 1e-12).
// theta0 = 1 when 1 - S <= E[theta]; frozen when the price cannot fund I.
LaissezFaireOutcome laissez_faire(const TypeDistribution& d, double S,
                                  double I);

// Period-1 sellers are [0, sell_t1_threshold]; period-2 sellers are
// (sell_t2_floor, sell_t2_threshold]. Absent prices mean the market is closed.
struct RegimeOutcome {
  double sell_t1_threshold = 0.0;
  double sell_t2_threshold = 0.0;
  double sell_t2_floor = 0.0;
  double price_t1 = 0.0;
  std::optional<double> price_t2_recipients;
  std::optional<double> price_t2_holdouts;
  double volume_total = 0.0;
};

struct OnePeriodOutcome {
  RegimeOutcome regime;
  // Every market share is sold at mean p_g; the government's pool mean can
  // take any value in [mean_g_min, mean_g_max], with mean_g_max reached only
  // when the market is inactive.
  double mean_g_min = 0.0;
  double mean_g_max = 0.0;
  double mean_m = 0.0;
};

// Single-period game. Requires p_g > max(p0, I).
OnePeriodOutcome one_period_bailout(const TypeDistribution& d,
                                    const MarketPrimitives& prim);

// Recipients' identities hidden. Requires p_g > p0 and p_g >= I.
RegimeOutcome secret_bailout(const TypeDistribution& d,
                             const MarketPrimitives& prim);

struct FullFreezeOutcome {
  RegimeOutcome regime;
  double theta_hat_g = 0.0;
  double theta2 = 0.0;
  int sign_changes = 0;  // roots found by the scan; 1 when unique
};

// Frozen economy with a bailout at p_g >= I: types up to theta_hat_g sell to
// the government and then hold, types in (theta_hat_g, theta2] hold and sell
// at p_g in period 2, where trunc_mean(theta_hat_g, theta2) = p_g.
FullFreezeOutcome full_freeze_delayed(const TypeDistribution& d,
                                      const MarketPrimitives& prim);

}  // namespace stigma

#endif  // STIGMA_BENCHMARK_HPP_
