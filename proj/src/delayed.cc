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

#include "stigma/delayed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "stigma/errors.hpp"
#include "stigma/numeric.hpp"

namespace stigma {
namespace {

constexpr int kRootScan = 256;

LaissezFaireOutcome checked_benchmark(const TypeDistribution& d,
                                      const MarketPrimitives& prim) {
  prim.validate();
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  if (lf.frozen) {
    throw DomainError("frozen economy: use full_freeze_delayed");
  }
  if (!(prim.p_g > lf.p0 + kPriceSlack)) {
    throw DomainError("delayed analysis requires p_g > p0");
  }
  return lf;
}

double holdout_surplus(const TypeDistribution& d, double p_g, double from,
                       double to) {
  return d.moment(from, to) - p_g * d.mass(from, to);
}

DsCandidate evaluate(const TypeDistribution& d, const MarketPrimitives& prim,
                     const LaissezFaireOutcome& lf, double theta_hat_g,
                     double mu_g, const DsOptions& opts) {
  DsCandidate out;
  DelayedEquilibrium& eq = out.evaluated;
  eq.p_g = prim.p_g;
  eq.theta_hat = lf.theta0;
  eq.theta_hat_g = theta_hat_g;
  eq.theta2 = std::min(prim.p_g + prim.S, 1.0);
  eq.mu_g = mu_g;
  eq.price_m_t1 = lf.p0;
  eq.price_recipients_t2 = lf.p0;
  eq.price_holdouts_t2 = prim.p_g;
  eq.volume = d.cdf(eq.theta2) + d.cdf(lf.theta0);

  const double sellers = d.cdf(lf.theta0);
  const double market_mass = (1.0 - mu_g) * sellers;
  const double band_mass = d.mass(theta_hat_g, eq.theta2);
  const double pool_mass = market_mass + band_mass;
  const double pool_moment =
      market_mass * lf.p0 + d.moment(theta_hat_g, eq.theta2);
  eq.breakeven_residual =
      pool_mass > 0.0 ? pool_moment / pool_mass - prim.p_g : -prim.p_g;

  Audience recipients;
  recipients.base_mass = mu_g * sellers;
  recipients.base_mean = lf.p0;
  recipients.band_floor = lf.theta0;
  recipients.band_cap = theta_hat_g;

  Audience holdouts;
  holdouts.base_mass = pool_mass;
  holdouts.base_mean = pool_mass > 0.0 ? pool_moment / pool_mass : 0.0;
  holdouts.band_floor = eq.theta2;
  holdouts.band_cap = std::numeric_limits<double>::infinity();

  DeviationScan r = scan_deviation(d, recipients, prim.S, lf.p0, prim.p_g,
                                   Support::kBounded, opts.deviation_grid_n);
  DeviationScan h = scan_deviation(d, holdouts, prim.S, prim.p_g, 1.0,
                                   Support::kBounded, opts.deviation_grid_n);
  eq.nodev_margin_recipients = r.margin;
  eq.nodev_margin_holdouts = h.margin;
  eq.nodev_score_recipients = r.score;
  eq.nodev_score_holdouts = h.score;

  if (std::fabs(eq.breakeven_residual) > opts.breakeven_tol) {
    out.rejected = "break-even";
  } else if (classify(r, opts.tol) != Verdict::kDeterred) {
    out.rejected = "recipient deviation";
  } else if (classify(h, opts.tol) != Verdict::kDeterred) {
    out.rejected = "holdout deviation";
  } else {
    out.equilibrium = eq;
  }
  return out;
}

}  // namespace

double gamma(const TypeDistribution& d, double S, double a) {
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("gamma requires a in [0, 1)");
  auto slack = [&](double x) { return trunc_mean(d, a, x) - x + S; };
  if (slack(1.0) >= 0.0) return 1.0;
  std::vector<double> roots = all_roots(slack, a, 1.0, kRootScan);
  if (roots.empty()) {
    throw NumericError("gamma: no crossing found", a, 1.0);
  }
  return roots.back();
}

double ds_breakeven_mu(const TypeDistribution& d, const MarketPrimitives& prim,
                       double theta_hat_g) {
  LaissezFaireOutcome lf = checked_benchmark(d, prim);
  double theta2 = std::min(prim.p_g + prim.S, 1.0);
  double surplus = holdout_surplus(d, prim.p_g, theta_hat_g, theta2);
  return 1.0 - surplus / (d.cdf(lf.theta0) * (prim.p_g - lf.p0));
}

DsCandidate ds_candidate(const TypeDistribution& d,
                         const MarketPrimitives& prim, double theta_hat_g,
                         double mu_g, const DsOptions& opts) {
  LaissezFaireOutcome lf = checked_benchmark(d, prim);
  double theta2 = std::min(prim.p_g + prim.S, 1.0);
  if (!(theta_hat_g >= lf.theta0 - 1e-12 && theta_hat_g < theta2)) {
    throw DomainError("theta_hat_g must lie in [theta0, theta2)");
  }
  if (!(mu_g > 0.0 && mu_g <= 1.0)) {
    throw DomainError("mu_g must lie in (0, 1]");
  }
  return evaluate(d, prim, lf, std::max(theta_hat_g, lf.theta0), mu_g, opts);
}

double DelayedSet::theta_hat_g_min() const {
  double v = members.front().theta_hat_g;
  for (const auto& m : members) v = std::min(v, m.theta_hat_g);
  return v;
}

double DelayedSet::theta_hat_g_max() const {
  double v = members.front().theta_hat_g;
  for (const auto& m : members) v = std::max(v, m.theta_hat_g);
  return v;
}

DelayedSet ds_solve(const TypeDistribution& d, const MarketPrimitives& prim,
                    const DsOptions& opts) {
  prim.validate();
  DelayedSet set;
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  if (lf.frozen || !(prim.p_g > lf.p0 + kPriceSlack)) return set;
  const double theta0 = lf.theta0;
  const double theta2 = std::min(prim.p_g + prim.S, 1.0);
  if (!(theta2 > theta0)) return set;
  const double sellers = d.cdf(theta0);
  const double gap = prim.p_g - lf.p0;

  auto keep = [&](double theta_hat_g, double mu_g) {
    if (!(mu_g > 0.0 && mu_g <= 1.0)) return;
    DsCandidate c = evaluate(d, prim, lf, theta_hat_g, mu_g, opts);
    if (c.equilibrium) set.members.push_back(*c.equilibrium);
  };

  for (int k = 0; k < opts.grid_n; ++k) {
    double x = theta0 + (theta2 - theta0) * k / opts.grid_n;
    double surplus = holdout_surplus(d, prim.p_g, x, theta2);
    keep(x, 1.0 - surplus / (sellers * gap));
  }
  const double top = theta0 + (theta2 - theta0) * (1.0 - 1e-9);
  for (int j = 1; j <= opts.mu_grid_n; ++j) {
    double mu = static_cast<double>(j) / opts.mu_grid_n;
    auto balance = [&](double x) {
      return holdout_surplus(d, prim.p_g, x, theta2) -
             (1.0 - mu) * sellers * gap;
    };
    for (double x : all_roots(balance, theta0, top, kRootScan)) keep(x, mu);
  }
  std::sort(set.members.begin(), set.members.end(),
            [](const DelayedEquilibrium& a, const DelayedEquilibrium& b) {
              return std::tie(a.theta_hat_g, a.mu_g) <
                     std::tie(b.theta_hat_g, b.mu_g);
            });
  return set;
}

double ds_sufficiency_threshold(const TypeDistribution& d, double S,
                                double I) {
  LaissezFaireOutcome lf = laissez_faire(d, S, I);
  if (lf.frozen || !(lf.theta0 < 1.0)) {
    throw DomainError("sufficiency threshold requires theta0 in (0, 1)");
  }
  return trunc_mean(d, lf.theta0, gamma(d, S, lf.theta0));
}

std::optional<DelayedEquilibrium> ds_exists_sufficient(
    const TypeDistribution& d, const MarketPrimitives& prim,
    const DsOptions& opts) {
  LaissezFaireOutcome lf = checked_benchmark(d, prim);
  if (!(lf.theta0 < 1.0) || prim.p_g >= 1.0) return std::nullopt;
  auto pooled = [&](double x) {
    return trunc_mean(d, x, gamma(d, prim.S, x)) - prim.p_g;
  };
  if (pooled(lf.theta0) > 0.0) return std::nullopt;
  double hi = 1.0 - 1e-12;
  double theta_hat_g = bisect(pooled, lf.theta0, hi, 1e-13);
  DsCandidate c = evaluate(d, prim, lf, theta_hat_g, 1.0, opts);
  if (!c.equilibrium) {
    throw ConsistencyError("sufficiency construction rejected: " + c.rejected);
  }
  return c.equilibrium;
}

EquilibriumClass classify(double theta_hat, double theta_hat_g, double theta2,
                          bool full_freeze, double tol) {
  if (!(0.0 <= theta_hat && theta_hat <= theta_hat_g &&
        theta_hat_g <= theta2 && theta2 <= 1.0)) {
    throw DomainError("cutoffs must satisfy 0 <= th <= th_g <= th2 <= 1");
  }
  EquilibriumClass out{EquilibriumKind::kDelayed, theta_hat, theta_hat_g,
                       theta2};
  if (theta_hat <= 0.0) {
    if (!full_freeze) {
      throw DomainError("theta_hat = 0 only arises in a full freeze");
    }
    return out;
  }
  if (theta2 - theta_hat_g <= tol) {
    if (theta_hat_g - theta_hat <= tol) {
      throw DomainError("short-lived cutoffs need theta_hat < theta_hat_g");
    }
    out.kind = EquilibriumKind::kShortLived;
  }
  return out;
}

}  // namespace stigma
