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

#include "stigma/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "stigma/errors.hpp"
#include "stigma/welfare.hpp"

namespace stigma {
namespace {

double parse_number(const std::string& field, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError(field, "not a finite number: '" + text + "'");
  }
  return v;
}

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

class CsvFile {
 public:
  CsvFile(const std::string& dir, const std::string& name,
          const std::string& header)
      : path_((std::filesystem::path(dir) / name).string()), out_(path_) {
    if (!out_) throw IoError("cannot write " + path_);
    out_ << header << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t k = 0; k < cells.size(); ++k) {
      if (k) out_ << ',';
      out_ << cells[k];
    }
    out_ << '\n';
  }

  ~CsvFile() noexcept(false) {
    out_.close();
    if (!out_ && std::uncaught_exceptions() == 0) {
      throw IoError("write failed: " + path_);
    }
  }

 private:
  std::string path_;
  std::ofstream out_;
};

void make_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir);
  }
}

// Runs body(k) for k in [0, n) on up to `threads` workers and rethrows the
// failure of the smallest k.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, std::max(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

MarketPrimitives primitives(const RunConfig& cfg, double p_g) {
  return MarketPrimitives{cfg.S, cfg.I, cfg.lambda, p_g};
}

template <typename T>
std::pair<double, double> range_of(const std::vector<T>& xs,
                                   double (*get)(const T&)) {
  double lo = get(xs.front());
  double hi = lo;
  for (const T& x : xs) {
    lo = std::min(lo, get(x));
    hi = std::max(hi, get(x));
  }
  return {lo, hi};
}

double sl_volume(const ShortLivedEquilibrium& e) { return e.volume; }
double sl_theta(const ShortLivedEquilibrium& e) { return e.theta_hat; }
double ds_theta(const DelayedEquilibrium& e) { return e.theta_hat_g; }

struct WelfareRow {
  std::optional<WelfareReport> no_bailout, secret, delayed, sl_min, sl_max;
};

WelfareRow welfare_row(const RunConfig& cfg, const TypeDistribution& d,
                       const LaissezFaireOutcome& lf, const SweepRow& row) {
  MarketPrimitives prim = primitives(cfg, row.p_g);
  WelfareRow w;
  w.no_bailout = welfare_of(d, prim, mechanism_from(d, prim, lf));
  if (row.secret) w.secret = welfare_of(d, prim, mechanism_from(d, prim, *row.secret));
  if (!row.ds.empty()) {
    w.delayed = welfare_of(d, prim, mechanism_from(d, prim, row.ds.front()));
  } else if (row.full_freeze) {
    w.delayed = welfare_of(d, prim, mechanism_from(d, prim, row.full_freeze->regime));
  }
  for (const auto& sl : row.sl) {
    WelfareReport r = welfare_of(d, prim, mechanism_from(d, prim, sl));
    if (!w.sl_min || r.welfare < w.sl_min->welfare) w.sl_min = r;
    if (!w.sl_max || r.welfare > w.sl_max->welfare) w.sl_max = r;
  }
  return w;
}

void write_welfare(const RunConfig& cfg, const TypeDistribution& d,
                   const std::vector<SweepRow>& rows) {
  LaissezFaireOutcome lf = laissez_faire(d, cfg.S, cfg.I);
  std::vector<WelfareRow> table(rows.size());
  parallel_for(static_cast<int>(rows.size()), cfg.threads, [&](int k) {
    table[k] = welfare_row(cfg, d, lf, rows[k]);
  });
  CsvFile out(cfg.out, "welfare.csv", "p_g,regime,welfare,deficit");
  for (size_t k = 0; k < rows.size(); ++k) {
    const WelfareRow& w = table[k];
    std::pair<const char*, const std::optional<WelfareReport>*> named[] = {
        {"no_bailout", &w.no_bailout}, {"secret", &w.secret},
        {"delayed", &w.delayed},       {"shortlived_min", &w.sl_min},
        {"shortlived_max", &w.sl_max}};
    for (const auto& [name, report] : named) {
      if (*report) {
        out.row({fmt(rows[k].p_g), name, fmt((*report)->welfare),
                 fmt((*report)->deficit)});
      } else {
        out.row({fmt(rows[k].p_g), name, "", ""});
      }
    }
  }
}

struct VerifyJob {
  std::string regime;
  std::optional<double> p_g;
  MarketPrimitives prim;
  std::optional<double> theta_hat, theta_hat_g, mu_g;
  std::function<EncodedProfile(const TypeGrid&)> encode;
};

}  // namespace

PgRange parse_pg(const std::string& text) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  PgRange r;
  if (parts.size() == 1) {
    r.min = r.max = parse_number("pg", parts[0]);
  } else if (parts.size() == 3) {
    r.min = parse_number("pg", parts[0]);
    r.max = parse_number("pg", parts[1]);
    r.step = parse_number("pg", parts[2]);
  } else {
    throw ConfigError("pg", "expected v or min:max:step, got '" + text + "'");
  }
  if (!(r.step > 0.0)) throw ConfigError("pg", "sweep step must be > 0");
  if (!(r.max >= r.min)) throw ConfigError("pg", "sweep max must be >= min");
  return r;
}

TypeDistribution load_distribution(const std::string& spec) {
  if (spec == "uniform") return TypeDistribution::uniform();
  const std::string prefix = "table:";
  if (spec.rfind(prefix, 0) != 0) {
    throw ConfigError("dist", "expected uniform or table:<path>, got '" + spec + "'");
  }
  try {
    return TypeDistribution::load_table(spec.substr(prefix.size()));
  } catch (const std::exception& e) {
    throw ConfigError("dist", e.what());
  }
}

void RunConfig::validate() const {
  if (dist != "uniform" && dist.rfind("table:", 0) != 0) {
    throw ConfigError("dist", "expected uniform or table:<path>, got '" + dist + "'");
  }
  if (!std::isfinite(S) || !(S > 0.0)) throw ConfigError("S", "must be > 0");
  if (!std::isfinite(I) || !(I > 0.0)) throw ConfigError("I", "must be > 0");
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ConfigError("lambda", "must be >= 0");
  }
  parse_pg(pg);
  auto at_least = [](const char* field, int v, int min) {
    if (v < min) {
      throw ConfigError(field, "must be >= " + std::to_string(min));
    }
  };
  at_least("sl_grid_n", sl_grid_n, 64);
  at_least("ds_grid_n", ds_grid_n, 8);
  at_least("ds_mu_grid_n", ds_mu_grid_n, 4);
  at_least("deviation_grid_n", deviation_grid_n, 16);
  at_least("oracle_n", oracle_n, 10);
  at_least("oracle_price_n", oracle_price_n, 2);
  at_least("threads", threads, 0);
  auto positive = [](const char* field, double v) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError(field, "must be > 0");
  };
  positive("tol", tol);
  positive("breakeven_tol", breakeven_tol);
  positive("accept_c", accept_c);
  if (support != "continued" && support != "bounded") {
    throw ConfigError("support", "expected continued or bounded");
  }
  if (out.empty()) throw ConfigError("out", "must not be empty");
  static const char* const kRegimes[] = {"laissez-faire", "secret", "sl", "ds",
                                         "full-freeze"};
  if (std::find(std::begin(kRegimes), std::end(kRegimes), regime) ==
      std::end(kRegimes)) {
    throw ConfigError("regime",
                      "expected laissez-faire, secret, sl, ds or full-freeze");
  }
  if (p2m && !std::isfinite(*p2m)) throw ConfigError("p2m", "must be finite");
}

std::vector<double> RunConfig::pg_values() const {
  PgRange r = parse_pg(pg);
  long n = static_cast<long>(std::floor((r.max - r.min) / r.step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(n);
  for (long k = 0; k < n; ++k) {
    // Rounded to 12 decimals so that grid ends such as 1.0 are exact.
    out.push_back(std::round((r.min + r.step * k) * 1e12) / 1e12);
  }
  return out;
}

Support RunConfig::support_mode() const {
  return support == "bounded" ? Support::kBounded : Support::kContinued;
}

SlOptions RunConfig::sl_options() const {
  SlOptions o;
  o.grid_n = sl_grid_n;
  o.deviation_grid_n = deviation_grid_n;
  o.tol = tol;
  o.support = support_mode();
  return o;
}

DsOptions RunConfig::ds_options() const {
  DsOptions o;
  o.grid_n = ds_grid_n;
  o.mu_grid_n = ds_mu_grid_n;
  o.deviation_grid_n = deviation_grid_n;
  o.tol = tol;
  o.breakeven_tol = breakeven_tol;
  return o;
}

RunConfig figure6_config() {
  RunConfig cfg;
  cfg.dist = "uniform";
  cfg.S = 1.0 / 3.0;
  cfg.I = 0.1;
  cfg.lambda = 0.2;
  cfg.pg = "0.34:1.0:0.005";
  return cfg;
}

std::vector<SweepRow> compute_sweep(const RunConfig& cfg,
                                    const TypeDistribution& d) {
  cfg.validate();
  const LaissezFaireOutcome lf = laissez_faire(d, cfg.S, cfg.I);
  const std::vector<double> pgs = cfg.pg_values();
  std::vector<SweepRow> rows(pgs.size());
  parallel_for(static_cast<int>(pgs.size()), cfg.threads, [&](int k) {
    SweepRow& row = rows[k];
    row.p_g = pgs[k];
    row.p0 = lf.p0;
    row.theta0 = lf.theta0;
    row.no_bailout_volume = lf.frozen ? 0.0 : 2.0 * d.cdf(lf.theta0);
    MarketPrimitives prim = primitives(cfg, row.p_g);
    bool active = row.p_g > lf.p0 + kPriceSlack && row.p_g >= cfg.I;
    if (!active) return;
    row.secret = secret_bailout(d, prim);
    if (lf.frozen) {
      row.full_freeze = full_freeze_delayed(d, prim);
      return;
    }
    row.sl = sl_solve(d, prim, cfg.sl_options()).members;
    row.ds = ds_solve(d, prim, cfg.ds_options()).members;
  });
  return rows;
}

void run_sweep(const RunConfig& cfg) {
  cfg.validate();
  TypeDistribution d = load_distribution(cfg.dist);
  std::vector<SweepRow> rows = compute_sweep(cfg, d);
  make_out_dir(cfg.out);
  {
    CsvFile out(cfg.out, "sl_set.csv",
                "p_g,theta_hat_min,theta_hat_max,count,volume_min,volume_max");
    for (const auto& row : rows) {
      if (row.sl.empty()) {
        out.row({fmt(row.p_g), "", "", "0", "", ""});
        continue;
      }
      auto [tlo, thi] = range_of(row.sl, sl_theta);
      auto [vlo, vhi] = range_of(row.sl, sl_volume);
      out.row({fmt(row.p_g), fmt(tlo), fmt(thi), std::to_string(row.sl.size()),
               fmt(vlo), fmt(vhi)});
    }
  }
  {
    CsvFile out(cfg.out, "ds_set.csv",
                "p_g,exists,theta_hat_g_min,theta_hat_g_max,volume");
    for (const auto& row : rows) {
      if (!row.ds.empty()) {
        auto [lo, hi] = range_of(row.ds, ds_theta);
        out.row({fmt(row.p_g), "1", fmt(lo), fmt(hi), fmt(row.ds.front().volume)});
      } else if (row.full_freeze) {
        const FullFreezeOutcome& ff = *row.full_freeze;
        out.row({fmt(row.p_g), "1", fmt(ff.theta_hat_g), fmt(ff.theta_hat_g),
                 fmt(ff.regime.volume_total)});
      } else {
        out.row({fmt(row.p_g), "0", "", "", ""});
      }
    }
  }
  {
    CsvFile out(cfg.out, "volumes.csv",
                "p_g,sl_volume_min,sl_volume_max,ds_volume,secret_volume,"
                "no_bailout_volume");
    for (const auto& row : rows) {
      std::optional<double> vlo, vhi, ds, secret;
      if (!row.sl.empty()) std::tie(vlo, vhi) = range_of(row.sl, sl_volume);
      if (!row.ds.empty()) ds = row.ds.front().volume;
      if (row.full_freeze) ds = row.full_freeze->regime.volume_total;
      if (row.secret) secret = row.secret->volume_total;
      out.row({fmt(row.p_g), fmt(vlo), fmt(vhi), fmt(ds), fmt(secret),
               fmt(row.no_bailout_volume)});
    }
  }
  write_welfare(cfg, d, rows);
}

void run_welfare(const RunConfig& cfg) {
  cfg.validate();
  TypeDistribution d = load_distribution(cfg.dist);
  std::vector<SweepRow> rows = compute_sweep(cfg, d);
  make_out_dir(cfg.out);
  write_welfare(cfg, d, rows);

  std::vector<std::vector<MatchedComparison>> matched(rows.size());
  parallel_for(static_cast<int>(rows.size()), cfg.threads, [&](int k) {
    MarketPrimitives prim = primitives(cfg, rows[k].p_g);
    for (const auto& sl : rows[k].sl) {
      matched[k].push_back(match_volume_secret(d, prim, sl));
    }
  });
  CsvFile out(cfg.out, "matched.csv",
              "p_g,theta_hat,p_g_prime,secret_welfare,shortlived_welfare,"
              "difference,dominates,note");
  for (size_t k = 0; k < rows.size(); ++k) {
    for (size_t j = 0; j < matched[k].size(); ++j) {
      const MatchedComparison& m = matched[k][j];
      std::string theta = fmt(rows[k].sl[j].theta_hat);
      if (!m.feasible) {
        out.row({fmt(rows[k].p_g), theta, "", "", "", "", "", m.reason});
        continue;
      }
      out.row({fmt(rows[k].p_g), theta, fmt(m.p_g_prime), fmt(m.secret.welfare),
               fmt(m.shortlived.welfare),
               fmt(m.secret.welfare - m.shortlived.welfare),
               m.dominates ? "1" : "0", ""});
    }
  }
}

void run_laissez_faire(const RunConfig& cfg) {
  cfg.validate();
  TypeDistribution d = load_distribution(cfg.dist);
  LaissezFaireOutcome lf = laissez_faire(d, cfg.S, cfg.I);
  TypeGrid grid = discretize(d, cfg.oracle_n);
  make_out_dir(cfg.out);
  CsvFile out(cfg.out, "laissez_faire.csv",
              "S,I,theta0,p0,frozen,candidate_theta0,candidate_p0,volume,"
              "grid_theta0");
  out.row({fmt(cfg.S), fmt(cfg.I), fmt(lf.theta0), fmt(lf.p0),
           lf.frozen ? "1" : "0", fmt(lf.candidate_theta0),
           fmt(lf.candidate_p0), fmt(lf.frozen ? 0.0 : 2.0 * d.cdf(lf.theta0)),
           fmt(brute_force_laissez_faire(grid, cfg.S, cfg.I))});
}

VerifyOutcome run_verify(const RunConfig& cfg) {
  cfg.validate();
  TypeDistribution d = load_distribution(cfg.dist);
  const LaissezFaireOutcome lf = laissez_faire(d, cfg.S, cfg.I);
  std::vector<VerifyJob> jobs;
  if (cfg.regime == "laissez-faire") {
    MarketPrimitives prim = primitives(cfg, 0.0);
    jobs.push_back({cfg.regime, std::nullopt, prim, std::nullopt, std::nullopt,
                    std::nullopt, [prim, lf](const TypeGrid& g) {
                      return encode(g, prim, lf);
                    }});
  } else {
    RunConfig solve = cfg;
    for (const SweepRow& row : compute_sweep(solve, d)) {
      MarketPrimitives prim = primitives(cfg, row.p_g);
      if (cfg.regime == "secret" && row.secret) {
        RegimeOutcome s = *row.secret;
        jobs.push_back({cfg.regime, row.p_g, prim, std::nullopt, std::nullopt,
                        std::nullopt, [prim, s](const TypeGrid& g) {
                          return encode_secret(g, prim, s);
                        }});
      }
      if (cfg.regime == "sl") {
        for (const auto& sl : row.sl) {
          jobs.push_back({cfg.regime, row.p_g, prim, sl.theta_hat,
                          sl.theta_hat_g, sl.mu_g,
                          [prim, sl, &d](const TypeGrid& g) {
                            return encode(g, d, prim, sl);
                          }});
        }
      }
      if (cfg.regime == "ds") {
        for (const auto& ds : row.ds) {
          jobs.push_back({cfg.regime, row.p_g, prim, ds.theta_hat,
                          ds.theta_hat_g, ds.mu_g,
                          [prim, ds](const TypeGrid& g) {
                            return encode(g, prim, ds);
                          }});
        }
      }
      if ((cfg.regime == "ds" || cfg.regime == "full-freeze") && row.full_freeze) {
        FullFreezeOutcome ff = *row.full_freeze;
        jobs.push_back({cfg.regime, row.p_g, prim, 0.0, ff.theta_hat_g, 1.0,
                        [prim, ff](const TypeGrid& g) {
                          return encode(g, prim, ff);
                        }});
      }
    }
  }
  if (jobs.empty()) {
    throw ConfigError("regime", "no " + cfg.regime +
                                    " equilibrium at the requested p_g");
  }

  const TypeGrid grid = discretize(d, cfg.oracle_n);
  std::vector<ViolationReport> reports(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int k) {
    EncodedProfile e = jobs[k].encode(grid);
    if (cfg.p2m) {
      e.prices.p2_m = *cfg.p2m;
      best_respond_t2(grid, e.prices, jobs[k].prim, e.profile);
    }
    reports[k] = verify_profile(grid, e.profile, e.prices, jobs[k].prim,
                                cfg.oracle_price_n);
  });

  VerifyOutcome outcome;
  outcome.bound = cfg.accept_c / cfg.oracle_n;
  outcome.profiles = static_cast<int>(jobs.size());
  make_out_dir(cfg.out);
  CsvFile out(cfg.out, "verify.csv",
              "regime,p_g,member,theta_hat,theta_hat_g,mu_g,agent,deviation,"
              "gain,at");
  for (size_t k = 0; k < jobs.size(); ++k) {
    const VerifyJob& j = jobs[k];
    const ViolationReport& r = reports[k];
    outcome.worst = std::max(outcome.worst, r.worst());
    std::vector<std::string> head = {j.regime, fmt(j.p_g), std::to_string(k),
                                     fmt(j.theta_hat), fmt(j.theta_hat_g),
                                     fmt(j.mu_g)};
    auto emit = [&](const std::string& agent, const std::string& deviation,
                    double gain, std::optional<double> at) {
      std::vector<std::string> cells = head;
      cells.insert(cells.end(), {agent, deviation,
                                 std::isfinite(gain) ? fmt(gain) : "", fmt(at)});
      out.row(cells);
    };
    emit("worst", "max of all", r.worst(), std::nullopt);
    for (const Violation& v : r.details) {
      emit(v.agent, v.deviation, v.gain,
           std::isfinite(v.gain) ? std::optional<double>(v.at) : std::nullopt);
    }
  }
  outcome.pass = outcome.worst <= outcome.bound;
  return outcome;
}

}  // namespace stigma
