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

#ifndef STIGMA_ORACLE_HPP_
#define STIGMA_ORACLE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stigma/benchmark.hpp"
#include "stigma/delayed.hpp"
#include "stigma/dist.hpp"
#include "stigma/shortlived.hpp"

namespace stigma {

enum class CellRule { kEqualWidth, kEqualMass };

struct TypeGrid {
  std::vector<double> types;    // representative type of each cell
  std::vector<double> weights;  // probability of each cell
  std::vector<double> edges;    // cell k is (edges[k], edges[k + 1]]
  int n() const { return static_cast<int>(types.size()); }
};

// Equal-width cells are represented by their midpoints, equal-mass cells by
// their conditional means. Requires n >= 10.
TypeGrid discretize(const TypeDistribution& d, int n,
                    CellRule rule = CellRule::kEqualWidth);

// Largest grid cutoff supporting a self-consistent funded market price, as
// the upper edge of the marginal cell. Zero when no cutoff is funded.
double brute_force_laissez_faire(const TypeGrid& grid, double S, double I);

enum class History { kGov = 0, kMarket = 1, kHold = 2 };

struct TypeStrategy {
  double prob_gov = 0.0;
  double prob_market = 0.0;
  double prob_hold = 1.0;
  // Period-2 choice after each period-1 action; true sells.
  std::optional<bool> t2_after[3];
  double prob(History h) const;
};

using StrategyProfile = std::vector<TypeStrategy>;

struct Prices {
  std::optional<double> p_g;   // government offer, period 1
  std::optional<double> p_m;   // market offer, period 1
  std::optional<double> p2_g;  // period 2 offer to bailout recipients
  std::optional<double> p2_m;  // period 2 offer to everyone else
  // Recipients are not observed; p2_m is the single period-2 offer.
  bool secret = false;
};

struct Violation {
  std::string agent;      // "firm" or the buyer audience
  std::string deviation;  // plan or price description
  double gain = 0.0;
  double at = 0.0;  // firm type or deviation price
};

struct ViolationReport {
  double worst_firm_gain = 0.0;
  double worst_buyer_gain = 0.0;
  double buyer_breakeven_residual = 0.0;
  std::vector<Violation> details;  // worst entry per agent class
  double worst() const;
};

enum class BuyerAudience { kMarketT1, kRecipientsT2, kOthersT2 };

const char* audience_name(BuyerAudience a);

// Per-unit profit of a buyer offering `price` alone to `audience`, given that
// firms best respond with every other offer held fixed. Empty when the offer
// attracts no mass.
std::optional<double> buyer_deviation_gain(const TypeGrid& grid,
                                           const StrategyProfile& profile,
                                           const Prices& prices,
                                           const MarketPrimitives& prim,
                                           BuyerAudience audience,
                                           double price);

ViolationReport verify_profile(const TypeGrid& grid,
                               const StrategyProfile& profile,
                               const Prices& prices,
                               const MarketPrimitives& prim,
                               int dev_price_grid_n = 512);

struct EncodedProfile {
  StrategyProfile profile;
  Prices prices;
};

// Sets every reachable period-2 choice to the best response at the posted
// offers, selling when indifferent.
void best_respond_t2(const TypeGrid& grid, const Prices& prices,
                     const MarketPrimitives& prim, StrategyProfile& profile);

EncodedProfile encode(const TypeGrid& grid, const MarketPrimitives& prim,
                      const LaissezFaireOutcome& lf);
EncodedProfile encode_secret(const TypeGrid& grid, const MarketPrimitives& prim,
                             const RegimeOutcome& secret);
// Recipients among types below theta_hat are all types up to a cutoff c plus
// a uniform share r of (c, theta_hat], with (c, r) fitted to the pool mean.
EncodedProfile encode(const TypeGrid& grid, const TypeDistribution& d,
                      const MarketPrimitives& prim,
                      const ShortLivedEquilibrium& sl);
EncodedProfile encode(const TypeGrid& grid, const MarketPrimitives& prim,
                      const DelayedEquilibrium& ds);
EncodedProfile encode(const TypeGrid& grid, const MarketPrimitives& prim,
                      const FullFreezeOutcome& ff);

}  // namespace stigma

#endif  // STIGMA_ORACLE_HPP_
