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

#include "stigma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "stigma/errors.hpp"
#include "stigma/numeric.hpp"

namespace stigma {
namespace {

constexpr double kTie = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr History kHistories[3] = {History::kGov, History::kMarket,
                                   History::kHold};
const char* const kHistoryName[3] = {"gov", "market", "hold"};

int idx(History h) { return static_cast<int>(h); }

// Payoffs of a type against fixed posted offers.
class Payoffs {
 public:
  Payoffs(const Prices& prices, const MarketPrimitives& prim)
      : prices_(prices), prim_(prim) {}

  double sale(double price) const {
    return price + (price >= prim_.I - kTie ? prim_.S : 0.0);
  }

  std::optional<double> t1_offer(History h) const {
    if (h == History::kGov) return prices_.p_g;
    if (h == History::kMarket) return prices_.p_m;
    return std::nullopt;
  }

  std::optional<double> t2_offer(History h) const {
    if (h == History::kGov && !prices_.secret) return prices_.p2_g;
    return prices_.p2_m;
  }

  bool available(History h) const {
    return h == History::kHold || t1_offer(h).has_value();
  }

  double first(History h, double theta) const {
    std::optional<double> p = t1_offer(h);
    return p ? sale(*p) : theta;
  }

  double continuation(History h, double theta) const {
    std::optional<double> p = t2_offer(h);
    return p ? std::max(theta, sale(*p)) : theta;
  }

  double best(double theta) const {
    double out = kNegInf;
    for (History h : kHistories) {
      if (available(h)) out = std::max(out, first(h, theta) + continuation(h, theta));
    }
    return out;
  }

 private:
  const Prices& prices_;
  const MarketPrimitives& prim_;
};

void check_shape(const TypeGrid& grid, const StrategyProfile& profile,
                 const Prices& prices) {
  if (profile.size() != grid.types.size()) {
    throw ProfileError("profile and grid sizes differ");
  }
  if (prices.secret && prices.p2_g && prices.p2_m && *prices.p2_g != *prices.p2_m) {
    throw ProfileError("a secret bailout posts one period-2 offer");
  }
  for (const std::optional<double>* p :
       {&prices.p_g, &prices.p_m, &prices.p2_g, &prices.p2_m}) {
    if (*p && !std::isfinite(**p)) throw ProfileError("offers must be finite");
  }
  const MarketPrimitives any{};
  Payoffs pay(prices, any);
  for (size_t i = 0; i < profile.size(); ++i) {
    const TypeStrategy& s = profile[i];
    double total = 0.0;
    for (History h : kHistories) {
      double p = s.prob(h);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ProfileError("mixing weights must lie in [0, 1]");
      }
      total += p;
      if (p == 0.0) continue;
      if (!pay.available(h)) {
        throw ProfileError(std::string("no offer for period-1 action ") +
                           kHistoryName[idx(h)]);
      }
      const std::optional<bool>& a = s.t2_after[idx(h)];
      if (!a) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "period-2 action missing after %s at type %.12g",
                      kHistoryName[idx(h)], grid.types[i]);
        throw ProfileError(buf);
      }
      if (*a && !pay.t2_offer(h)) {
        throw ProfileError(std::string("sale without a period-2 offer after ") +
                           kHistoryName[idx(h)]);
      }
    }
    if (std::fabs(total - 1.0) > 1e-12) {
      throw ProfileError("mixing weights must sum to 1");
    }
  }
}

struct Pool {
  double mass = 0.0;
  double moment = 0.0;
  void add(double w, double theta) {
    mass += w;
    moment += w * theta;
  }
};

StrategyProfile empty_profile(const TypeGrid& grid) {
  return StrategyProfile(grid.types.size());
}

void set_action(TypeStrategy& s, double gov, double market) {
  s.prob_gov = gov;
  s.prob_market = market;
  s.prob_hold = 1.0 - gov - market;
  if (s.prob_hold < 1e-14) s.prob_hold = 0.0;
}

// Types up to `upper` (after the previous band) take the government offer
// with probability gov and the market offer with probability market.
struct Band {
  double upper;
  double gov;
  double market;
};

// Cells straddling a band edge mix the band actions by the share of the cell
// width on each side.
StrategyProfile banded_profile(const TypeGrid& grid,
                               std::initializer_list<Band> bands) {
  StrategyProfile out(grid.types.size());
  for (int i = 0; i < grid.n(); ++i) {
    double a = grid.edges[i];
    double b = grid.edges[i + 1];
    auto below = [&](double t) {
      return b > a ? std::clamp((t - a) / (b - a), 0.0, 1.0)
                   : (grid.types[i] <= t ? 1.0 : 0.0);
    };
    double prev = 0.0;
    double gov = 0.0;
    double market = 0.0;
    for (const Band& band : bands) {
      double cur = std::max(below(band.upper), prev);
      gov += (cur - prev) * band.gov;
      market += (cur - prev) * band.market;
      prev = cur;
    }
    set_action(out[i], gov, market);
  }
  return out;
}

}  // namespace

double TypeStrategy::prob(History h) const {
  if (h == History::kGov) return prob_gov;
  if (h == History::kMarket) return prob_market;
  return prob_hold;
}

double ViolationReport::worst() const {
  return std::max({worst_firm_gain, worst_buyer_gain, buyer_breakeven_residual});
}

const char* audience_name(BuyerAudience a) {
  switch (a) {
    case BuyerAudience::kMarketT1:
      return "t1 market";
    case BuyerAudience::kRecipientsT2:
      return "t2 recipients";
    case BuyerAudience::kOthersT2:
      return "t2 non-recipients";
  }
  return "";
}

TypeGrid discretize(const TypeDistribution& d, int n, CellRule rule) {
  if (n < 10) throw DomainError("discretize requires n >= 10");
  TypeGrid g;
  g.edges.resize(n + 1);
  g.types.resize(n);
  g.weights.resize(n);
  for (int k = 0; k <= n; ++k) {
    double u = static_cast<double>(k) / n;
    g.edges[k] = rule == CellRule::kEqualWidth ? u : d.quantile(u);
  }
  g.edges[0] = 0.0;
  g.edges[n] = 1.0;
  std::vector<double> cum(n + 1);
  for (int k = 0; k <= n; ++k) cum[k] = d.cdf(g.edges[k]);
  for (int k = 0; k < n; ++k) {
    double a = g.edges[k];
    double b = g.edges[k + 1];
    g.weights[k] = std::max(cum[k + 1] - cum[k], 0.0);
    g.types[k] = rule == CellRule::kEqualWidth ? 0.5 * (a + b)
                                               : trunc_mean(d, a, b);
  }
  return g;
}

double brute_force_laissez_faire(const TypeGrid& grid, double S, double I) {
  double mass = 0.0;
  double moment = 0.0;
  double cutoff = 0.0;
  for (int k = 0; k < grid.n(); ++k) {
    mass += grid.weights[k];
    moment += grid.weights[k] * grid.types[k];
    if (!(mass > 0.0)) continue;
    double price = moment / mass;
    if (grid.types[k] <= price + S && price >= I) cutoff = grid.edges[k + 1];
  }
  return cutoff;
}

std::optional<double> buyer_deviation_gain(const TypeGrid& grid,
                                           const StrategyProfile& profile,
                                           const Prices& prices,
                                           const MarketPrimitives& prim,
                                           BuyerAudience audience,
                                           double price) {
  Payoffs pay(prices, prim);
  Pool pool;
  double offer = pay.sale(price);
  for (int i = 0; i < grid.n(); ++i) {
    double theta = grid.types[i];
    double w = grid.weights[i];
    const TypeStrategy& s = profile[i];
    switch (audience) {
      case BuyerAudience::kMarketT1: {
        double dev = offer + pay.continuation(History::kMarket, theta);
        if (dev >= pay.best(theta) - kTie) pool.add(w, theta);
        break;
      }
      case BuyerAudience::kRecipientsT2: {
        if (prices.secret) return std::nullopt;
        double reach = w * s.prob_gov;
        if (reach > 0.0 && offer >= pay.continuation(History::kGov, theta) - kTie) {
          pool.add(reach, theta);
        }
        break;
      }
      case BuyerAudience::kOthersT2: {
        double reach = w * (s.prob_market + s.prob_hold +
                            (prices.secret ? s.prob_gov : 0.0));
        if (reach > 0.0 && offer >= pay.continuation(History::kHold, theta) - kTie) {
          pool.add(reach, theta);
        }
        break;
      }
    }
  }
  if (!(pool.mass > 0.0)) return std::nullopt;
  return pool.moment / pool.mass - price;
}

ViolationReport verify_profile(const TypeGrid& grid,
                               const StrategyProfile& profile,
                               const Prices& prices,
                               const MarketPrimitives& prim,
                               int dev_price_grid_n) {
  prim.validate();
  if (dev_price_grid_n < 2) {
    throw DomainError("verify_profile requires dev_price_grid_n >= 2");
  }
  check_shape(grid, profile, prices);
  Payoffs pay(prices, prim);
  ViolationReport report;

  Violation firm{"firm", "none", 0.0, 0.0};
  for (int i = 0; i < grid.n(); ++i) {
    double theta = grid.types[i];
    const TypeStrategy& s = profile[i];
    double eq = 0.0;
    for (History h : kHistories) {
      double p = s.prob(h);
      if (p == 0.0) continue;
      double second = *s.t2_after[idx(h)] ? pay.sale(*pay.t2_offer(h)) : theta;
      eq += p * (pay.first(h, theta) + second);
    }
    for (History h : kHistories) {
      if (!pay.available(h)) continue;
      for (bool sell : {false, true}) {
        if (sell && !pay.t2_offer(h)) continue;
        double second = sell ? pay.sale(*pay.t2_offer(h)) : theta;
        double gain = pay.first(h, theta) + second - eq;
        if (gain > firm.gain) {
          firm.gain = gain;
          firm.at = theta;
          firm.deviation = std::string(kHistoryName[idx(h)]) +
                           (sell ? " then sell" : " then hold");
        }
      }
    }
  }
  report.worst_firm_gain = firm.gain;
  report.details.push_back(firm);

  Pool t1, t2_rec, t2_oth;
  for (int i = 0; i < grid.n(); ++i) {
    double theta = grid.types[i];
    double w = grid.weights[i];
    const TypeStrategy& s = profile[i];
    if (s.prob_market > 0.0) t1.add(w * s.prob_market, theta);
    for (History h : kHistories) {
      double p = s.prob(h);
      if (p == 0.0 || !*s.t2_after[idx(h)]) continue;
      bool recipient = h == History::kGov && !prices.secret;
      (recipient ? t2_rec : t2_oth).add(w * p, theta);
    }
  }
  auto breakeven = [&](const Pool& pool, const std::optional<double>& price,
                       BuyerAudience a) {
    if (!price || !(pool.mass > 0.0)) return;
    double residual = pool.moment / pool.mass - *price;
    report.buyer_breakeven_residual =
        std::max(report.buyer_breakeven_residual, std::fabs(residual));
    report.details.push_back(
        {std::string(audience_name(a)) + " break-even", "posted offer",
         residual, *price});
  };
  breakeven(t1, prices.p_m, BuyerAudience::kMarketT1);
  if (!prices.secret) breakeven(t2_rec, prices.p2_g, BuyerAudience::kRecipientsT2);
  breakeven(t2_oth, prices.p2_m, BuyerAudience::kOthersT2);

  report.worst_buyer_gain = kNegInf;
  for (BuyerAudience a : {BuyerAudience::kMarketT1, BuyerAudience::kRecipientsT2,
                          BuyerAudience::kOthersT2}) {
    if (a == BuyerAudience::kRecipientsT2 && prices.secret) continue;
    Violation v{audience_name(a), "no attracted mass", kNegInf, 0.0};
    for (int k = 0; k < dev_price_grid_n; ++k) {
      double price = prim.I + (1.0 - prim.I) * k / (dev_price_grid_n - 1);
      std::optional<double> g =
          buyer_deviation_gain(grid, profile, prices, prim, a, price);
      if (g && *g > v.gain) {
        v.gain = *g;
        v.at = price;
        v.deviation = "offer";
      }
    }
    report.worst_buyer_gain = std::max(report.worst_buyer_gain, v.gain);
    report.details.push_back(v);
  }
  return report;
}

void best_respond_t2(const TypeGrid& grid, const Prices& prices,
                     const MarketPrimitives& prim, StrategyProfile& profile) {
  Payoffs pay(prices, prim);
  for (int i = 0; i < grid.n(); ++i) {
    double theta = grid.types[i];
    for (History h : kHistories) {
      std::optional<double> p = pay.t2_offer(h);
      profile[i].t2_after[idx(h)] = p && pay.sale(*p) >= theta - kTie;
    }
  }
}

EncodedProfile encode(const TypeGrid& grid, const MarketPrimitives& prim,
                      const LaissezFaireOutcome& lf) {
  EncodedProfile out;
  out.profile = empty_profile(grid);
  if (!lf.frozen) {
    out.prices.p_m = lf.p0;
    out.prices.p2_m = lf.p0;
    out.profile = banded_profile(grid, {{lf.theta0, 0.0, 1.0}});
  }
  best_respond_t2(grid, out.prices, prim, out.profile);
  return out;
}

EncodedProfile encode_secret(const TypeGrid& grid, const MarketPrimitives& prim,
                             const RegimeOutcome& secret) {
  EncodedProfile out;
  out.profile = banded_profile(grid, {{secret.sell_t1_threshold, 1.0, 0.0}});
  out.prices.secret = true;
  out.prices.p_g = secret.price_t1;
  out.prices.p2_m = secret.price_t2_recipients;
  best_respond_t2(grid, out.prices, prim, out.profile);
  return out;
}

EncodedProfile encode(const TypeGrid& grid, const TypeDistribution& d,
                      const MarketPrimitives& prim,
                      const ShortLivedEquilibrium& sl) {
  const double low = d.cdf(sl.theta_hat);
  const double target = sl.mu_g * low;
  auto share = [&](double c) {
    double rest = low - d.cdf(c);
    return rest > 0.0 ? (target - d.cdf(c)) / rest : 0.0;
  };
  auto excess = [&](double c) {
    double mom = d.moment(0.0, c) + share(c) * d.moment(c, sl.theta_hat);
    return mom / target - sl.mean_g;
  };
  double top = d.quantile(target);
  if (excess(top) > 1e-12) {
    throw DomainError("recipient pool mean is below every attainable mix");
  }
  double c = excess(0.0) <= 0.0 ? 0.0 : bisect(excess, 0.0, top, 1e-14);
  double r = std::clamp(share(c), 0.0, 1.0);

  EncodedProfile out;
  out.profile = banded_profile(grid, {{c, 1.0, 0.0},
                                      {sl.theta_hat, r, 1.0 - r},
                                      {sl.theta_hat_g, 1.0, 0.0}});
  out.prices.p_g = sl.p_g;
  out.prices.p_m = sl.mean_m;
  out.prices.p2_g = sl.mean_g;
  out.prices.p2_m = sl.mean_m;
  best_respond_t2(grid, out.prices, prim, out.profile);
  return out;
}

EncodedProfile encode(const TypeGrid& grid, const MarketPrimitives& prim,
                      const DelayedEquilibrium& ds) {
  EncodedProfile out;
  out.profile = banded_profile(grid, {{ds.theta_hat, ds.mu_g, 1.0 - ds.mu_g},
                                      {ds.theta_hat_g, 1.0, 0.0}});
  out.prices.p_g = ds.p_g;
  out.prices.p_m = ds.price_m_t1;
  out.prices.p2_g = ds.price_recipients_t2;
  out.prices.p2_m = ds.price_holdouts_t2;
  best_respond_t2(grid, out.prices, prim, out.profile);
  return out;
}

EncodedProfile encode(const TypeGrid& grid, const MarketPrimitives& prim,
                      const FullFreezeOutcome& ff) {
  EncodedProfile out;
  out.profile = banded_profile(grid, {{ff.theta_hat_g, 1.0, 0.0}});
  out.prices.p_g = ff.regime.price_t1;
  out.prices.p2_m = ff.regime.price_t2_holdouts;
  best_respond_t2(grid, out.prices, prim, out.profile);
  return out;
}

}  // namespace stigma
