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

#ifndef STIGMA_SWEEP_HPP_
#define STIGMA_SWEEP_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stigma/deviation.hpp"
#include "stigma/dist.hpp"
#include "stigma/oracle.hpp"

namespace stigma {

struct PgRange {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
};

// "v" or "min:max:step". Throws ConfigError on field "pg".
PgRange parse_pg(const std::string& text);

// "uniform" or "table:<path>". Throws ConfigError on field "dist".
TypeDistribution load_distribution(const std::string& spec);

struct RunConfig {
  std::string dist = "uniform";
  double S = 1.0 / 3.0;
  double I = 0.1;
  double lambda = 0.2;
  std::string pg = "0.34:1.0:0.005";
  int sl_grid_n = 512;
  int ds_grid_n = 128;
  int ds_mu_grid_n = 64;
  int deviation_grid_n = 512;
  int oracle_n = 2000;
  int oracle_price_n = 512;
  double tol = 1e-7;
  double breakeven_tol = 1e-9;
  double accept_c = 4.0;  // verification bound is accept_c / oracle_n
  std::string support = "continued";
  std::string out = ".";
  int threads = 0;  // 0 uses every hardware thread
  // verify only
  std::string regime = "ds";
  std::optional<double> p2m;

  // Throws ConfigError naming the first invalid field.
  void validate() const;
  std::vector<double> pg_values() const;
  Support support_mode() const;
  SlOptions sl_options() const;
  DsOptions ds_options() const;
};

RunConfig figure6_config();

struct SweepRow {
  double p_g = 0.0;
  double p0 = 0.0;
  double theta0 = 0.0;
  std::vector<ShortLivedEquilibrium> sl;
  std::vector<DelayedEquilibrium> ds;
  std::optional<FullFreezeOutcome> full_freeze;
  std::optional<RegimeOutcome> secret;
  double no_bailout_volume = 0.0;
  bool ds_exists() const { return !ds.empty() || full_freeze.has_value(); }
};

std::vector<SweepRow> compute_sweep(const RunConfig& cfg,
                                    const TypeDistribution& d);

// Writes sl_set.csv, ds_set.csv, volumes.csv and welfare.csv into cfg.out.
void run_sweep(const RunConfig& cfg);

// Writes welfare.csv and matched.csv into cfg.out.
void run_welfare(const RunConfig& cfg);

// Writes laissez_faire.csv into cfg.out.
void run_laissez_faire(const RunConfig& cfg);

struct VerifyOutcome {
  bool pass = true;
  double bound = 0.0;
  double worst = 0.0;
  int profiles = 0;
};

// Verifies every equilibrium of cfg.regime (laissez-faire, secret, sl, ds,
// full-freeze) at each p_g and writes verify.csv into cfg.out.
VerifyOutcome run_verify(const RunConfig& cfg);

}  // namespace stigma

#endif  // STIGMA_SWEEP_HPP_
