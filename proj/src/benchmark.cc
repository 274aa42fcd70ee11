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

#include "stigma/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stigma/errors.hpp"
#include "stigma/numeric.hpp"

namespace stigma {

void MarketPrimitives::validate() const {
  if (!std::isfinite(S) || !(S > 0.0)) throw DomainError("S must be > 0");
  if (!std::isfinite(I) || !(I > 0.0)) throw DomainError("I must be > 0");
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw DomainError("lambda must be >= 0");
  }
  if (!std::isfinite(p_g)) throw DomainError("p_g must be finite");
}

LaissezFaireOutcome laissez_faire(const TypeDistribution& d, double S,
                                  double I) {
  MarketPrimitives{S, I, 0.0, 0.0}.validate();
  LaissezFaireOutcome out;
  double theta = 1.0;
  double price = d.mean();
  if (1.0 - S - d.mean() > 0.0) {
    auto excess = [&](double x) { return x - S - lower_mean(d, x); };
    theta = bisect(excess, 0.0, 1.0, 1e-12);
    price = lower_mean(d, theta);
  }
  out.candidate_theta0 = theta;
  out.candidate_p0 = price;
  if (price < I) {
    out.frozen = true;
    out.theta0 = 0.0;
    out.p0 = 0.0;
  } else {
    out.theta0 = theta;
    out.p0 = price;
  }
  return out;
}

OnePeriodOutcome one_period_bailout(const TypeDistribution& d,
                                    const MarketPrimitives& prim) {
  prim.validate();
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  if (!(prim.p_g > std::max(lf.p0, prim.I) + kPriceSlack)) {
    throw DomainError("one-period bailout requires p_g > max(p0, I)");
  }
  OnePeriodOutcome out;
  double top = std::min(prim.p_g + prim.S, 1.0);
  out.regime.sell_t1_threshold = top;
  out.regime.price_t1 = prim.p_g;
  out.regime.volume_total = d.cdf(top);
  out.mean_m = prim.p_g;
  out.mean_g_max = lower_mean(d, top);
  out.mean_g_min = out.mean_g_max;
  if (prim.p_g < top && out.mean_g_max < prim.p_g) {
    // The largest market share with mean p_g is an upper interval (c, top].
    auto gap = [&](double c) { return trunc_mean(d, c, top) - prim.p_g; };
    double c = bisect(gap, 0.0, top, 1e-12);
    out.mean_g_min = lower_mean(d, c);
  }
  return out;
}

RegimeOutcome secret_bailout(const TypeDistribution& d,
                             const MarketPrimitives& prim) {
  prim.validate();
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  if (!(prim.p_g > lf.p0 + kPriceSlack) || prim.p_g < prim.I) {
    throw DomainError("secret bailout requires p_g > p0 and p_g >= I");
  }
  RegimeOutcome out;
  out.sell_t1_threshold = std::min(prim.p_g + prim.S, 1.0);
  out.sell_t2_threshold = lf.theta0;
  out.price_t1 = prim.p_g;
  if (!lf.frozen) {
    out.price_t2_recipients = lf.p0;
    out.price_t2_holdouts = lf.p0;
  }
  out.volume_total = d.cdf(out.sell_t1_threshold) + d.cdf(lf.theta0);
  return out;
}

FullFreezeOutcome full_freeze_delayed(const TypeDistribution& d,
                                      const MarketPrimitives& prim) {
  prim.validate();
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  if (!lf.frozen) {
    throw DomainError("full-freeze delayed outcome requires theta0 = 0");
  }
  if (prim.p_g < prim.I) {
    throw DomainError("full-freeze delayed outcome requires p_g >= I");
  }
  FullFreezeOutcome out;
  out.theta2 = std::min(prim.p_g + prim.S, 1.0);
  double top = out.theta2;
  auto gap = [&](double x) { return trunc_mean(d, x, top) - prim.p_g; };
  // Open interval: the right end has zero mass and returns top itself.
  std::vector<double> roots = all_roots(gap, 0.0, top * (1.0 - 1e-12), 512);
  out.sign_changes = static_cast<int>(roots.size());
  if (roots.empty()) {
    throw NumericError(
        "no theta_hat_g in (0, theta2) with trunc_mean(theta_hat_g, theta2) = "
        "p_g; check the primitives",
        0.0, top);
  }
  out.theta_hat_g = roots.front();
  RegimeOutcome& r = out.regime;
  r.sell_t1_threshold = out.theta_hat_g;
  r.sell_t2_floor = out.theta_hat_g;
  r.sell_t2_threshold = top;
  r.price_t1 = prim.p_g;
  r.price_t2_holdouts = prim.p_g;
  r.volume_total = d.cdf(top);
  return out;
}

}  // namespace stigma
