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

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "laws.hpp"
#include "stigma/benchmark.hpp"
#include "stigma/delayed.hpp"
#include "stigma/oracle.hpp"
#include "stigma/shortlived.hpp"
#include "stigma/welfare.hpp"

namespace stigma {
namespace {

const TypeDistribution kUniform = TypeDistribution::uniform();
constexpr double kS = 1.0 / 3.0;
constexpr double kI = 0.1;

// Collects failed conditions of one criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 4) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool pass() const { return failed_ == 0 && count_ > 0; }
  std::string summary() const {
    std::string s = notes_;
    if (failed_) {
      s += (s.empty() ? "" : "; ") + std::to_string(failed_) + "/" +
           std::to_string(count_) + " conditions failed:";
      for (const auto& f : failures_) s += " [" + f + "]";
    } else {
      s += (s.empty() ? "" : "; ") + std::to_string(count_) + " conditions";
    }
    return s;
  }

 private:
  int count_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void laissez_faire_exactness(Check& c) {
  LaissezFaireOutcome lf = laissez_faire(kUniform, kS, kI);
  c.require(std::fabs(lf.theta0 - 2.0 / 3.0) <= 1e-10, "theta0 = " + num(lf.theta0));
  c.require(std::fabs(lf.p0 - 1.0 / 3.0) <= 1e-10, "p0 = " + num(lf.p0));
  c.require(!lf.frozen, "S=1/3 frozen");
  LaissezFaireOutcome frozen = laissez_faire(kUniform, 0.05, 0.1);
  c.require(frozen.frozen && frozen.theta0 == 0.0, "S=0.05 not frozen");
  LaissezFaireOutcome full = laissez_faire(kUniform, 0.6, 0.1);
  c.require(full.theta0 == 1.0, "S=0.6 theta0 = " + num(full.theta0));
  c.note("theta0=" + num(lf.theta0) + " p0=" + num(lf.p0));
}

void sl_boundary_check(Check& c) {
  std::optional<double> b = sl_boundary(kUniform, kS, kI);
  c.require(b.has_value(), "no boundary");
  if (b) {
    c.require(std::fabs(*b - 0.804) <= 0.01, "boundary " + num(*b));
    c.note("boundary=" + num(*b));
  }
  c.require(std::fabs(sl_existence_bound(kUniform, kS, kI) - 1.0) <= 1e-10,
            "existence bound");
  for (double p_g : {1.0, 1.05, 1.2}) {
    MarketPrimitives prim{kS, kI, 0.0, p_g};
    c.require(sl_solve(kUniform, prim).empty(), "nonempty at p_g=" + num(p_g));
  }
}

struct Draw {
  const TypeDistribution* d;
  const char* law;
  MarketPrimitives prim;
};

// From the uniform sweep plus (S, I) draws for both laws.
std::vector<Draw> sl_draws(const TypeDistribution& normal) {
  std::vector<Draw> out;
  for (int k = 0; k <= 93; ++k) {
    out.push_back({&kUniform, "uniform", {kS, kI, 0.0, 0.34 + 0.005 * k}});
  }
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const TypeDistribution* d : {&kUniform, &normal}) {
    const char* law = d == &kUniform ? "uniform" : "normal";
    for (int draw = 0; draw < 8; ++draw) {
      double S = 0.15 + 0.3 * unit(rng);
      double I = 0.02 + 0.1 * unit(rng);
      LaissezFaireOutcome lf = laissez_faire(*d, S, I);
      if (lf.frozen || lf.theta0 >= 1.0) continue;
      double bound = sl_existence_bound(*d, S, I);
      for (int k = 1; k <= 6; ++k) {
        out.push_back({d, law, {S, I, 0.0, lf.p0 + (bound - lf.p0) * k / 7.0}});
      }
    }
  }
  return out;
}

void sl_invariants(Check& c, const std::vector<Draw>& draws) {
  int members = 0;
  SlOptions opts;
  opts.grid_n = 128;
  for (const Draw& w : draws) {
    const TypeDistribution& d = *w.d;
    const MarketPrimitives& prim = w.prim;
    LaissezFaireOutcome lf = laissez_faire(d, prim.S, prim.I);
    for (const auto& m : sl_solve(d, prim, opts).members) {
      ++members;
      std::string at = std::string(w.law) + " S=" + num(prim.S) +
                       " p_g=" + num(prim.p_g) + " theta_hat=" + num(m.theta_hat);
      c.require(m.mean_g < m.mean_m && m.mean_m < prim.p_g, "ordering at " + at);
      c.require(m.theta_hat < lf.theta0 && lf.theta0 < m.theta_hat_g,
                "cutoffs at " + at);
      c.require(m.theta_hat_g == std::min(prim.p_g + prim.S, 1.0),
                "theta_hat_g at " + at);
      c.require(m.mean_m >= lf.p0, "market price below p0 at " + at);
      // Type theta_hat is indifferent between the two period-1 routes.
      double arbitrage = (prim.p_g + prim.S + m.theta_hat) - 2.0 * (m.mean_m + prim.S);
      c.require(std::fabs(arbitrage) <= 1e-9, "arbitrage at " + at);
      double averaging = m.mu_g * m.mean_g + (1.0 - m.mu_g) * m.mean_m -
                         trunc_mean(d, 0.0, m.theta_hat);
      c.require(std::fabs(averaging) <= 1e-9, "averaging at " + at);
    }
  }
  c.require(members > 100, "only " + std::to_string(members) + " members");
  c.note(std::to_string(members) + " members");
}

void sl_volume_bound(Check& c, const std::vector<Draw>& draws) {
  SlOptions opts;
  opts.grid_n = 128;
  int members = 0;
  double worst = 1e9;
  std::string worst_at;
  int below = 0;
  int below_uncapped = 0;
  for (const Draw& w : draws) {
    const TypeDistribution& d = *w.d;
    LaissezFaireOutcome lf = laissez_faire(d, w.prim.S, w.prim.I);
    double baseline = 2.0 * d.cdf(lf.theta0);
    for (const auto& m : sl_solve(d, w.prim, opts).members) {
      ++members;
      double volume = d.cdf(m.theta_hat) + d.cdf(m.theta_hat_g);
      if (w.prim.S == kS && w.d == &kUniform) {
        c.require(volume > 4.0 / 3.0, "uniform S=1/3 volume " + num(volume));
      }
      std::string at = std::string(w.law) + " S=" + num(w.prim.S) +
                       " I=" + num(w.prim.I) + " p_g=" + num(w.prim.p_g) +
                       ": " + num(volume) + " vs 2F(theta0)=" + num(baseline);
      c.require(volume > baseline, at);
      if (!(volume > baseline)) {
        ++below;
        if (m.theta_hat_g < 1.0) ++below_uncapped;
      }
      if (volume - baseline < worst) {
        worst = volume - baseline;
        worst_at = at;
      }
    }
  }
  c.note(std::to_string(members) + " members, least excess " + num(worst) +
         " (" + worst_at + "), " + std::to_string(below) + " below of which " +
         std::to_string(below_uncapped) + " with theta_hat_g < 1");
}

void ds_volume_identities(Check& c) {
  int rows = 0;
  for (int k = 0; k <= 132; ++k) {
    double p_g = 0.34 + 0.005 * k;
    MarketPrimitives prim{kS, kI, 0.0, p_g};
    DelayedSet ds = ds_solve(kUniform, prim);
    if (ds.empty()) continue;
    ++rows;
    double secret = secret_bailout(kUniform, prim).volume_total;
    double closed = 2.0 / 3.0 + std::min(p_g + kS, 1.0);
    double max_sl = 0.0;
    for (const auto& m : sl_solve(kUniform, prim).members) {
      max_sl = std::max(max_sl, m.volume);
    }
    for (const auto& m : ds.members) {
      c.require(m.volume == secret, "DS volume != secret at p_g=" + num(p_g));
      c.require(std::fabs(m.volume - closed) <= 1e-10,
                "DS volume " + num(m.volume) + " at p_g=" + num(p_g));
      c.require(m.volume > max_sl, "SL volume not below DS at p_g=" + num(p_g));
    }
  }
  MarketPrimitives at9{kS, kI, 0.0, 0.9};
  DelayedSet ds = ds_solve(kUniform, at9);
  c.require(!ds.empty() && std::fabs(ds.members.front().volume - 5.0 / 3.0) <= 1e-10,
            "p_g=0.9 volume");
  c.require(rows >= 132, "DS rows " + std::to_string(rows));
  c.note(std::to_string(rows) + " p_g rows with DS; p_g=0.9 volume=" +
         num(ds.members.front().volume));
}

void ds_sufficiency(Check& c) {
  double threshold = ds_sufficiency_threshold(kUniform, kS, kI);
  c.require(std::fabs(threshold - 5.0 / 6.0) <= 1e-9, "threshold " + num(threshold));
  MarketPrimitives prim{kS, kI, 0.0, 0.9};
  std::optional<DelayedEquilibrium> e = ds_exists_sufficient(kUniform, prim);
  c.require(e.has_value(), "no construction");
  if (!e) return;
  c.require(std::fabs(e->theta_hat_g - 0.8) <= 1e-9, "theta_hat_g " + num(e->theta_hat_g));
  c.require(std::fabs(e->mu_g - 1.0) <= 1e-12, "mu_g " + num(e->mu_g));
  DsCandidate cand = ds_candidate(kUniform, prim, e->theta_hat_g, e->mu_g);
  c.require(cand.equilibrium.has_value(), "ds_candidate rejects: " + cand.rejected);
  TypeGrid g = discretize(kUniform, 2000);
  EncodedProfile enc = encode(g, prim, *e);
  ViolationReport r = verify_profile(g, enc.profile, enc.prices, prim);
  c.require(r.worst_firm_gain <= 2e-3 && r.worst_buyer_gain <= 2e-3 &&
                r.buyer_breakeven_residual <= 2e-3,
            "oracle worst " + num(r.worst()));
  c.note("threshold=" + num(threshold) + " theta_hat_g=" + num(e->theta_hat_g) +
         " mu_g=" + num(e->mu_g) + " oracle worst=" + num(r.worst()));
}

void full_freeze_outcome(Check& c) {
  MarketPrimitives prim{0.05, 0.1, 0.0, 0.4};
  FullFreezeOutcome ff = full_freeze_delayed(kUniform, prim);
  c.require(std::fabs(ff.theta_hat_g - 0.35) <= 1e-9, "theta_hat_g " + num(ff.theta_hat_g));
  c.require(ff.sign_changes == 1, "roots " + std::to_string(ff.sign_changes));
  c.note("theta_hat_g=" + num(ff.theta_hat_g));
}

void deficits_agree(Check& c, const TypeDistribution& d,
                    const MarketPrimitives& prim, const DirectMechanism& m,
                    const std::string& what) {
  WelfareReport r = welfare_of(d, prim, m);
  c.require(std::fabs(r.deficit - r.deficit_direct) <= 1e-8, "deficits of " + what);
}

void welfare_dominance(Check& c, const TypeDistribution& normal) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SlOptions opts;
  opts.grid_n = 128;
  int compared = 0;
  int unmatched = 0;
  double least_gap = 1e9;
  for (const TypeDistribution* dp : {&kUniform, &normal}) {
    const TypeDistribution& d = *dp;
    for (int draw = 0; draw < 10; ++draw) {
      double S = 0.15 + 0.3 * unit(rng);
      double I = 0.02 + 0.1 * unit(rng);
      double lambda = 0.05 + 0.95 * unit(rng);
      LaissezFaireOutcome lf = laissez_faire(d, S, I);
      if (lf.frozen || lf.theta0 >= 1.0) continue;
      double bound = sl_existence_bound(d, S, I);
      double p_g = lf.p0 + (bound - lf.p0) * (0.05 + 0.7 * unit(rng));
      MarketPrimitives prim{S, I, lambda, p_g};
      MarketPrimitives free = prim;
      free.lambda = 0.0;
      deficits_agree(c, d, prim, mechanism_from(d, prim, lf), "laissez-faire");
      deficits_agree(c, d, prim, mechanism_from(d, prim, secret_bailout(d, prim)),
                     "secret");
      DelayedSet ds = ds_solve(d, prim);
      for (const auto& m : ds.members) {
        deficits_agree(c, d, prim, mechanism_from(d, prim, m), "delayed");
      }
      for (const auto& sl : sl_solve(d, prim, opts).members) {
        deficits_agree(c, d, prim, mechanism_from(d, prim, sl), "short-lived");
        MatchedComparison mc = match_volume_secret(d, prim, sl);
        if (!mc.feasible) {
          ++unmatched;
          continue;
        }
        ++compared;
        double gap = mc.secret.welfare - mc.shortlived.welfare;
        least_gap = std::min(least_gap, gap);
        c.require(gap > 0.0, "secret not above SL, gap " + num(gap));
        MatchedComparison z = match_volume_secret(d, free, sl);
        c.require(std::fabs(z.secret.welfare - z.shortlived.welfare) <= 1e-9,
                  "lambda=0 gap " + num(z.secret.welfare - z.shortlived.welfare));
      }
    }
  }
  MarketPrimitives frozen{0.05, 0.1, 0.3, 0.4};
  deficits_agree(c, kUniform, frozen,
                 mechanism_from(kUniform, frozen, full_freeze_delayed(kUniform, frozen).regime),
                 "full freeze");
  c.require(compared > 50, "compared " + std::to_string(compared));
  c.note(std::to_string(compared) + " matched pairs, least gap " + num(least_gap) +
         ", " + std::to_string(unmatched) + " without a volume match");
}

void oracle_agreement(Check& c, const TypeDistribution& normal) {
  const int n = 2000;
  TypeGrid g = discretize(kUniform, n);
  int profiles = 0;
  double worst = 0.0;
  auto accept = [&](const MarketPrimitives& prim, const EncodedProfile& e,
                    const TypeGrid& grid, const std::string& what) {
    ViolationReport r = verify_profile(grid, e.profile, e.prices, prim);
    ++profiles;
    worst = std::max(worst, r.worst());
    c.require(r.worst() <= 2e-3, what + " worst " + num(r.worst()));
  };
  auto t0 = std::chrono::steady_clock::now();
  for (double S : {kS, 0.05, 0.6}) {
    MarketPrimitives prim{S, kI, 0.0, 0.0};
    accept(prim, encode(g, prim, laissez_faire(kUniform, S, kI)), g, "laissez-faire");
  }
  for (double p_g : {0.4, 0.6, 0.9}) {
    MarketPrimitives prim{kS, kI, 0.0, p_g};
    accept(prim, encode_secret(g, prim, secret_bailout(kUniform, prim)), g, "secret");
  }
  for (double p_g : {0.4, 0.5, 0.6, 0.7, 0.8}) {
    MarketPrimitives prim{kS, kI, 0.0, p_g};
    for (const auto& m : sl_solve(kUniform, prim).members) {
      accept(prim, encode(g, kUniform, prim, m), g, "SL p_g=" + num(p_g));
    }
  }
  for (double p_g : {0.4, 0.6, 0.8, 0.9}) {
    MarketPrimitives prim{kS, kI, 0.0, p_g};
    for (const auto& m : ds_solve(kUniform, prim).members) {
      accept(prim, encode(g, prim, m), g, "DS p_g=" + num(p_g));
    }
  }
  MarketPrimitives ffp{0.05, 0.1, 0.0, 0.4};
  accept(ffp, encode(g, ffp, full_freeze_delayed(kUniform, ffp)), g, "full freeze");
  TypeGrid gn = discretize(normal, n);
  MarketPrimitives np{0.25, 0.05, 0.0, 0.6};
  for (const auto& m : sl_solve(normal, np).members) {
    accept(np, encode(gn, normal, np, m), gn, "normal SL");
  }
  for (const auto& m : ds_solve(normal, np).members) {
    accept(np, encode(gn, np, m), gn, "normal DS");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Refuted candidate against the closed-form recipients' pool.
  MarketPrimitives prim{kS, kI, 0.0, 0.5};
  SlCandidate cand = sl_candidate(kUniform, prim, 0.5);
  c.require(cand.candidate.has_value(), "refuted candidate infeasible");
  if (!cand.candidate) return;
  const ShortLivedEquilibrium& sl = *cand.candidate;
  EncodedProfile e = encode(g, kUniform, prim, sl);
  ViolationReport r = verify_profile(g, e.profile, e.prices, prim);
  double base = sl.mu_g * sl.theta_hat;
  double top = 0.30 + kS;
  double closed = (base * sl.mean_g + 0.5 * (top * top - 0.25)) /
                      (base + top - 0.5) - 0.30;
  std::optional<double> at30 = buyer_deviation_gain(
      g, e.profile, e.prices, prim, BuyerAudience::kRecipientsT2, 0.30);
  c.require(at30 && std::fabs(*at30 - closed) <= 1e-3 && *at30 > 0.0,
            "gain at 0.30 " + (at30 ? num(*at30) : std::string("none")));
  c.require(std::fabs(closed - 0.006) <= 5e-4, "closed form " + num(closed));
  auto rec = std::find_if(r.details.begin(), r.details.end(), [](const Violation& v) {
    return v.agent == "t2 recipients";
  });
  c.require(rec != r.details.end() && rec->gain > 0.0 &&
                rec->gain == r.worst_buyer_gain,
            "recipients not the worst audience");
  c.note(std::to_string(profiles) + " profiles, worst " + num(worst) + ", " +
         num(secs / profiles * 1e3) + " ms/profile; refuted candidate gain " +
         (at30 ? num(*at30) : "none") + " at p'=0.30 (closed form " + num(closed) +
         "), grid sup " + num(rec->gain) + " at p'=" + num(rec->at));
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(STIGMA_CLI) + " " + args + " > /dev/null 2>&1";
  int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void determinism(Check& c) {
  namespace fs = std::filesystem;
  fs::path root = fs::path(STIGMA_TEST_OUT) / "acceptance";
  fs::remove_all(root);
  std::string a = (root / "a").string();
  std::string b = (root / "b").string();
  c.require(run_cli("figure6 --out " + a) == 0, "first run");
  c.require(run_cli("figure6 --out " + b) == 0, "second run");
  size_t bytes = 0;
  for (const char* f : {"sl_set.csv", "ds_set.csv", "volumes.csv", "welfare.csv"}) {
    std::string x = testing::slurp(a + "/" + f);
    std::string y = testing::slurp(b + "/" + f);
    bytes += x.size();
    c.require(!x.empty() && x == y, std::string(f) + " differs");
  }
  c.note(std::to_string(bytes) + " bytes compared");
}

}  // namespace
}  // namespace stigma

int main() {
  using stigma::Check;
  const stigma::TypeDistribution normal = stigma::testing::truncated_normal();
  const std::vector<stigma::Draw> draws = stigma::sl_draws(normal);
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"laissez-faire exactness", stigma::laissez_faire_exactness},
      {"SL existence boundary", stigma::sl_boundary_check},
      {"SL invariant suite: orderings and identities",
       [&](Check& c) { stigma::sl_invariants(c, draws); }},
      {"SL invariant suite: total volume above no-bailout volume",
       [&](Check& c) { stigma::sl_volume_bound(c, draws); }},
      {"DS volume identities", stigma::ds_volume_identities},
      {"DS sufficiency construction", stigma::ds_sufficiency},
      {"full-freeze delayed outcome", stigma::full_freeze_outcome},
      {"welfare dominance and deficit agreement",
       [&](Check& c) { stigma::welfare_dominance(c, normal); }},
      {"oracle agreement", [&](Check& c) { stigma::oracle_agreement(c, normal); }},
      {"determinism", stigma::determinism},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      crit.run(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.pass()) ++failed;
    std::printf("%s  %s: %s (%.2fs)\n", c.pass() ? "PASS" : "FAIL", crit.name,
                c.summary().c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
