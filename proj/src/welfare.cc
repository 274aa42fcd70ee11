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

#include "stigma/welfare.hpp"

#include <algorithm>
#include <cmath>

#include "stigma/errors.hpp"
#include "stigma/numeric.hpp"

namespace stigma {
namespace {

constexpr double kDeficitAgreement = 1e-8;
constexpr double kWelfareTie = 1e-9;

// Appends (lo, hi] unless empty.
void add_band(DirectMechanism& m, double lo, double hi, int q, double t) {
  if (hi > lo) m.bands.push_back({lo, hi, q, t});
}

void add_share(const TypeDistribution& d, DirectMechanism& m, double lo,
               double hi, double fraction, double mean) {
  if (hi > lo && fraction > 0.0 && d.mass(lo, hi) > 0.0) {
    m.government.push_back({lo, hi, fraction, mean});
  }
}

void close(DirectMechanism& m, double S) {
  double top = m.bands.empty() ? 0.0 : m.bands.back().hi;
  add_band(m, top, 1.0, 0, 0.0);
  m.u_bar = m.payoff(1.0, S);
}

// Integral of F over [a, b].
double cdf_integral(const TypeDistribution& d, double a, double b) {
  return b * d.cdf(b) - a * d.cdf(a) - d.moment(a, b);
}

}  // namespace

const MechanismBand& DirectMechanism::band_at(double theta) const {
  for (const auto& b : bands) {
    if (theta <= b.hi) return b;
  }
  return bands.back();
}

double DirectMechanism::payoff(double theta, double S) const {
  const MechanismBand& b = band_at(theta);
  return b.transfer + theta * (2 - b.quantity) + S * b.quantity;
}

double DirectMechanism::envelope_payoff(double theta) const {
  double u = u_bar;
  for (const auto& b : bands) {
    double lo = std::max(b.lo, theta);
    if (b.hi > lo) u -= (2 - b.quantity) * (b.hi - lo);
  }
  return u;
}

DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const LaissezFaireOutcome& lf) {
  (void)d;
  DirectMechanism m;
  add_band(m, 0.0, lf.theta0, 2, 2.0 * lf.p0);
  close(m, prim.S);
  return m;
}

DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const RegimeOutcome& regime) {
  DirectMechanism m;
  m.p_g = regime.price_t1;
  const double t1 = regime.sell_t1_threshold;
  const double lo2 = regime.sell_t2_floor;
  const double hi2 = regime.sell_t2_threshold;
  double p2 = 0.0;
  if (hi2 > lo2) {
    if (regime.price_t2_holdouts) {
      p2 = *regime.price_t2_holdouts;
    } else if (regime.price_t2_recipients) {
      p2 = *regime.price_t2_recipients;
    } else {
      throw DomainError("period-2 sellers without a period-2 price");
    }
  }
  std::vector<double> cuts = {0.0, t1, lo2, hi2};
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i];
    double b = cuts[i + 1];
    if (!(b > a)) continue;
    bool first = b <= t1;
    bool second = a >= lo2 && b <= hi2;
    add_band(m, a, b, int(first) + int(second),
             (first ? regime.price_t1 : 0.0) + (second ? p2 : 0.0));
  }
  add_share(d, m, 0.0, t1, 1.0, lower_mean(d, t1));
  close(m, prim.S);
  return m;
}

DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const ShortLivedEquilibrium& sl) {
  DirectMechanism m;
  m.p_g = sl.p_g;
  add_band(m, 0.0, sl.theta_hat, 2, sl.p_g + sl.mean_g);
  add_band(m, sl.theta_hat, sl.theta_hat_g, 1, sl.p_g);
  add_share(d, m, 0.0, sl.theta_hat, sl.mu_g, sl.mean_g);
  add_share(d, m, sl.theta_hat, sl.theta_hat_g, 1.0,
            trunc_mean(d, sl.theta_hat, sl.theta_hat_g));
  close(m, prim.S);
  return m;
}

DirectMechanism mechanism_from(const TypeDistribution& d,
                               const MarketPrimitives& prim,
                               const DelayedEquilibrium& ds) {
  DirectMechanism m;
  m.p_g = ds.p_g;
  add_band(m, 0.0, ds.theta_hat, 2, ds.p_g + ds.price_recipients_t2);
  add_band(m, ds.theta_hat, ds.theta2, 1, ds.p_g);
  add_share(d, m, 0.0, ds.theta_hat, ds.mu_g, ds.price_recipients_t2);
  add_share(d, m, ds.theta_hat, ds.theta_hat_g, 1.0,
            trunc_mean(d, ds.theta_hat, ds.theta_hat_g));
  close(m, prim.S);
  return m;
}

WelfareReport welfare_of(const TypeDistribution& d,
                         const MarketPrimitives& prim,
                         const DirectMechanism& mech) {
  WelfareReport r;
  double envelope = mech.u_bar - 2.0;
  for (const auto& b : mech.bands) {
    double mass = d.mass(b.lo, b.hi);
    double moment = d.moment(b.lo, b.hi);
    r.volume += b.quantity * mass;
    r.deficit_direct += b.transfer * mass - b.quantity * moment;
    envelope += b.quantity * (cdf_integral(d, b.lo, b.hi) - prim.S * mass);
  }
  for (const auto& g : mech.government) {
    r.deficit_ledger += g.fraction * d.mass(g.lo, g.hi) * (mech.p_g - g.mean);
  }
  r.deficit = envelope;
  if (std::fabs(r.deficit - r.deficit_direct) > kDeficitAgreement) {
    throw ConsistencyError("envelope deficit " + std::to_string(r.deficit) +
                           " differs from direct deficit " +
                           std::to_string(r.deficit_direct));
  }
  r.investment_surplus = prim.S * r.volume;
  r.welfare = 2.0 * d.mean() + r.investment_surplus - prim.lambda * r.deficit;
  return r;
}

MatchedComparison match_volume_secret(const TypeDistribution& d,
                                      const MarketPrimitives& prim,
                                      const ShortLivedEquilibrium& sl) {
  MatchedComparison out;
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  const double target = sl.volume;
  auto excess = [&](double p) {
    return d.cdf(std::min(p + prim.S, 1.0)) + d.cdf(lf.theta0) - target;
  };
  if (excess(lf.p0) >= 0.0) {
    out.reason = "volume not above laissez-faire";
    return out;
  }
  if (excess(prim.p_g) < 0.0) {
    out.reason = "volume not reachable below p_g";
    return out;
  }
  double p = bisect(excess, lf.p0, prim.p_g, 1e-14);
  if (p < prim.I || !(p > lf.p0 + kPriceSlack)) {
    out.reason = "matching price cannot fund I";
    return out;
  }
  if (!(p < prim.p_g)) {
    throw ConsistencyError("matched secret price is not below p_g");
  }
  out.feasible = true;
  out.p_g_prime = p;
  MarketPrimitives secret = prim;
  secret.p_g = p;
  out.secret = welfare_of(d, secret,
                          mechanism_from(d, secret, secret_bailout(d, secret)));
  out.shortlived = welfare_of(d, prim, mechanism_from(d, prim, sl));
  double gap = out.secret.welfare - out.shortlived.welfare;
  out.dominates =
      prim.lambda > 0.0 ? gap > 0.0 : std::fabs(gap) <= kWelfareTie;
  return out;
}

}  // namespace stigma
