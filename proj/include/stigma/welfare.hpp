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

#ifndef STIGMA_WELFARE_HPP_
#define STIGMA_WELFARE_HPP_

#include <string>
#include <vector>

#include "stigma/benchmark.hpp"
#include "stigma/delayed.hpp"
#include "stigma/dist.hpp"
#include "stigma/shortlived.hpp"

namespace stigma {

// Types in (lo, hi] (the first band also holds theta = 0) sell `quantity`
// units in total and receive `transfer`.
struct MechanismBand {
  double lo = 0.0;
  double hi = 0.0;
  int quantity = 0;
  double transfer = 0.0;
};

// The government buys `fraction` of the types in (lo, hi]; the bought part
// has average quality `mean`.
struct GovernmentShare {
  double lo = 0.0;
  double hi = 0.0;
  double fraction = 0.0;
  double mean = 0.0;
};

// Outcome map (Q, T) of an equilibrium.
struct DirectMechanism {
  std::vector<MechanismBand> bands;  // ordered, covering [0, 1]
  std::vector<GovernmentShare> government;
  double p_g = 0.0;
  double u_bar = 2.0;  // payoff of theta = 1

  const MechanismBand& band_at(double theta) const;
  // Two-period payoff T + theta (2 - Q) + S Q.
  double payoff(double theta, double S) const;
  // u_bar - integral over (theta, 1] of (2 - Q).
  double envelope_payoff(double theta) const;
};

DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const LaissezFaireOutcome& lf);
// Secret bailout or full-freeze outcome: period-1 sellers are bought by the
// government at price_t1.
DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const RegimeOutcome& regime);
DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const ShortLivedEquilibrium& sl);
DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const DelayedEquilibrium& ds);

struct WelfareReport {
  double welfare = 0.0;
  double investment_surplus = 0.0;  // S * E[Q]
  double deficit = 0.0;             // envelope form
  double deficit_direct = 0.0;      // integral of (T - theta Q) f
  double deficit_ledger = 0.0;      // government purchases at p_g
  double volume = 0.0;              // E[Q]
};

// E[2 theta] + S E[Q] - lambda * deficit. Throws ConsistencyError when the
// envelope and direct deficits differ by more than 1e-8.
WelfareReport welfare_of(const TypeDistribution& d,
                         const MarketPrimitives& prim,
                         const DirectMechanism& mech);

struct MatchedComparison {
  bool feasible = false;
  std::string reason;  // why no match exists
  double p_g_prime = 0.0;
  WelfareReport secret;
  WelfareReport shortlived;
  bool dominates = false;  // secret > SL when lambda > 0, equal otherwise
};

// Secret bailout price p' with the same total volume as the short-lived
// equilibrium, found by bisection on (p0, p_g].
MatchedComparison match_volume_secret(const TypeDistribution& d,
                                      const MarketPrimitives& prim,
                                      const ShortLivedEquilibrium& sl);

}  // namespace stigma

#endif  // STIGMA_WELFARE_HPP_
