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

#include "stigma/shortlived.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stigma/errors.hpp"
#include "stigma/numeric.hpp"

namespace stigma {
namespace {

constexpr double kEndMargin = 1e-6;
constexpr double kRefineTol = 1e-10;

struct Evaluation {
  bool pass = false;
  bool indeterminate = false;
  double merit = -std::numeric_limits<double>::infinity();
  ShortLivedEquilibrium eq;
};

SlCandidate candidate_at(const TypeDistribution& d,
                         const MarketPrimitives& prim, double theta_hat) {
  SlCandidate out;
  ShortLivedEquilibrium eq;
  eq.p_g = prim.p_g;
  eq.theta_hat = theta_hat;
  eq.theta_hat_g = std::min(prim.p_g + prim.S, 1.0);
  eq.mean_m = 0.5 * (theta_hat + prim.p_g - prim.S);
  eq.mean_g = theta_hat - prim.S;
  eq.stigma = eq.mean_m - eq.mean_g;
  double pooled = lower_mean(d, theta_hat);
  eq.mu_g = (eq.mean_m - pooled) / (eq.mean_m - eq.mean_g);
  eq.volume = d.cdf(theta_hat) + d.cdf(eq.theta_hat_g);

  auto fail = [&out](const char* name, double amount) {
    out.violated = name;
    out.violation = amount;
    return out;
  };
  if (eq.mean_g < prim.I) return fail("funding", prim.I - eq.mean_g);
  if (!(eq.mu_g > 0.0)) return fail("mu_g", -eq.mu_g);
  if (!(eq.mu_g < 1.0)) return fail("mu_g", eq.mu_g - 1.0);
  double bottom = lower_mean(d, d.quantile(eq.mu_g * d.cdf(theta_hat)));
  if (eq.mean_g < bottom) return fail("composition", bottom - eq.mean_g);
  if (!(eq.mean_g < eq.mean_m)) return fail("ordering", eq.mean_g - eq.mean_m);
  if (!(eq.mean_m < prim.p_g)) return fail("ordering", eq.mean_m - prim.p_g);
  out.candidate = eq;
  return out;
}

Evaluation evaluate(const TypeDistribution& d, const MarketPrimitives& prim,
                    double theta_hat, const SlOptions& opts) {
  Evaluation ev;
  SlCandidate c = candidate_at(d, prim, theta_hat);
  if (!c.candidate) {
    ev.merit = -c.violation;
    return ev;
  }
  ev.eq = *c.candidate;
  SlScans scans = sl_nodev_check(d, prim, ev.eq, opts);
  ev.eq.nodev_margin_recipients = scans.recipients.margin;
  ev.eq.nodev_margin_holdouts = scans.holdouts.margin;
  ev.eq.nodev_score_recipients = scans.recipients.score;
  ev.eq.nodev_score_holdouts = scans.holdouts.score;
  Verdict r = classify(scans.recipients, opts.tol);
  Verdict h = classify(scans.holdouts, opts.tol);
  ev.pass = r == Verdict::kDeterred && h == Verdict::kDeterred;
  ev.indeterminate = !ev.pass && r != Verdict::kProfitable &&
                     h != Verdict::kProfitable;
  ev.merit = -opts.tol - std::max(scans.recipients.score, scans.holdouts.score);
  return ev;
}

void check_price(const LaissezFaireOutcome& lf, const MarketPrimitives& prim) {
  if (!(prim.p_g > lf.p0 + kPriceSlack)) {
    throw DomainError("short-lived analysis requires p_g > p0");
  }
}

}  // namespace

SlCandidate sl_candidate(const TypeDistribution& d,
                         const MarketPrimitives& prim, double theta_hat) {
  prim.validate();
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  check_price(lf, prim);
  if (!(theta_hat > 0.0 && theta_hat < lf.theta0)) {
    throw DomainError("theta_hat must lie in (0, theta0)");
  }
  return candidate_at(d, prim, theta_hat);
}

SlScans sl_nodev_check(const TypeDistribution& d, const MarketPrimitives& prim,
                       const ShortLivedEquilibrium& cand,
                       const SlOptions& opts) {
  const bool bounded = opts.support == Support::kBounded;
  const double top = bounded ? cand.theta_hat_g : prim.p_g + prim.S;
  const double sellers = d.cdf(cand.theta_hat);

  Audience recipients;
  recipients.base_mass = cand.mu_g * sellers;
  recipients.base_mean = cand.mean_g;
  recipients.band_floor = cand.theta_hat;
  recipients.band_cap = top;

  Audience holdouts;
  holdouts.base_mass = (1.0 - cand.mu_g) * sellers;
  holdouts.base_mean = cand.mean_m;
  holdouts.band_floor = top;
  holdouts.band_cap = std::numeric_limits<double>::infinity();

  SlScans scans;
  scans.recipients = scan_deviation(d, recipients, prim.S, cand.mean_g,
                                    prim.p_g, opts.support,
                                    opts.deviation_grid_n);
  scans.holdouts = scan_deviation(d, holdouts, prim.S, prim.p_g, 1.0,
                                  opts.support, opts.deviation_grid_n);
  return scans;
}

ShortLivedSet sl_solve(const TypeDistribution& d, const MarketPrimitives& prim,
                       const SlOptions& opts) {
  prim.validate();
  if (opts.grid_n < 64) throw DomainError("sl_solve requires grid_n >= 64");
  LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
  check_price(lf, prim);

  const int n = opts.grid_n;
  const double lo = kEndMargin;
  const double hi = lf.theta0 - kEndMargin;
  ShortLivedSet set;
  if (!(hi > lo)) return set;

  std::vector<double> grid(n);
  std::vector<Evaluation> evals(n);
  for (int k = 0; k < n; ++k) {
    grid[k] = lo + (hi - lo) * k / (n - 1);
    evals[k] = evaluate(d, prim, grid[k], opts);
    if (evals[k].indeterminate) ++set.indeterminate;
  }
  auto passes = [&](double t) { return evaluate(d, prim, t, opts).pass; };
  auto refined = [&](double t) { return evaluate(d, prim, t, opts).eq; };

  bool any = std::any_of(evals.begin(), evals.end(),
                         [](const Evaluation& e) { return e.pass; });
  if (!any) {
    // A supported run narrower than the grid spacing is sought around the
    // best-scoring point.
    int best = 0;
    for (int k = 1; k < n; ++k) {
      if (evals[k].merit > evals[best].merit) best = k;
    }
    double a = grid[std::max(best - 1, 0)];
    double b = grid[std::min(best + 1, n - 1)];
    Extremum e = golden_max(
        [&](double t) { return evaluate(d, prim, t, opts).merit; }, a, b,
        kRefineTol);
    Evaluation ev = evaluate(d, prim, e.x, opts);
    if (!ev.pass) return set;
    set.members.push_back(refined(bisect_predicate(passes, e.x, a, kRefineTol)));
    set.members.push_back(ev.eq);
    set.members.push_back(refined(bisect_predicate(passes, e.x, b, kRefineTol)));
  } else {
    for (int k = 0; k < n; ++k) {
      if (!evals[k].pass) continue;
      if (k > 0 && !evals[k - 1].pass) {
        set.members.push_back(
            refined(bisect_predicate(passes, grid[k], grid[k - 1], kRefineTol)));
      }
      set.members.push_back(evals[k].eq);
      if (k + 1 < n && !evals[k + 1].pass) {
        set.members.push_back(
            refined(bisect_predicate(passes, grid[k], grid[k + 1], kRefineTol)));
      }
    }
  }
  std::sort(set.members.begin(), set.members.end(),
            [](const ShortLivedEquilibrium& x, const ShortLivedEquilibrium& y) {
              return x.theta_hat < y.theta_hat;
            });
  auto same = [](const ShortLivedEquilibrium& x,
                 const ShortLivedEquilibrium& y) {
    return x.theta_hat == y.theta_hat;
  };
  set.members.erase(std::unique(set.members.begin(), set.members.end(), same),
                    set.members.end());
  return set;
}

double sl_existence_bound(const TypeDistribution& d, double S, double I) {
  LaissezFaireOutcome lf = laissez_faire(d, S, I);
  if (lf.frozen || !(lf.theta0 < 1.0)) {
    throw DomainError("existence bound requires theta0 in (0, 1)");
  }
  return 2.0 * lf.theta0 - lf.p0;
}

std::optional<double> sl_boundary(const TypeDistribution& d, double S,
                                  double I, double tol,
                                  const SlOptions& opts) {
  LaissezFaireOutcome lf = laissez_faire(d, S, I);
  if (lf.frozen || !(lf.theta0 < 1.0)) return std::nullopt;
  const double lo = lf.p0;
  const double hi = sl_existence_bound(d, S, I);
  auto nonempty = [&](double p_g) {
    return !sl_solve(d, {S, I, 0.0, p_g}, opts).empty();
  };
  constexpr int kCoarse = 64;
  int last = -1;
  for (int k = 1; k < kCoarse; ++k) {
    if (nonempty(lo + (hi - lo) * k / kCoarse)) last = k;
  }
  if (last < 0) return std::nullopt;
  return bisect_predicate(nonempty, lo + (hi - lo) * last / kCoarse,
                          lo + (hi - lo) * (last + 1) / kCoarse, tol);
}

}  // namespace stigma
