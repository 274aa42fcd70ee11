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

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "stigma/errors.hpp"
#include "stigma/sweep.hpp"

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kNumeric = 3, kVerify = 4 };

void warn_on_validation(const stigma::RunConfig& cfg) {
  stigma::ValidationReport v = stigma::validate(stigma::load_distribution(cfg.dist));
  auto note = [](const char* what, const stigma::InvariantResult& r) {
    if (!r.pass) {
      std::fprintf(stderr, "warning: %s check failed (worst %.12g at %.12g)\n",
                   what, r.worst, r.at);
    }
  };
  note("cdf/density", v.cdf_density);
  note("log-concavity", v.log_concavity);
  note("regularity", v.regularity);
}

void add_common(CLI::App& app, stigma::RunConfig& cfg) {
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_option("--dist", cfg.dist, "uniform or table:<path>")
      ->capture_default_str();
  app.add_option("--S", cfg.S, "Net project surplus")->capture_default_str();
  app.add_option("--I", cfg.I, "Funding requirement")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "Deadweight cost of public funds")
      ->capture_default_str();
  app.add_option("--pg", cfg.pg, "Bailout price: v or min:max:step")
      ->capture_default_str();
  app.add_option("--sl-grid-n", cfg.sl_grid_n, "Short-lived theta_hat grid")
      ->capture_default_str();
  app.add_option("--ds-grid-n", cfg.ds_grid_n, "Delayed theta_hat_g grid")
      ->capture_default_str();
  app.add_option("--ds-mu-grid-n", cfg.ds_mu_grid_n, "Delayed mu_g grid")
      ->capture_default_str();
  app.add_option("--deviation-grid-n", cfg.deviation_grid_n,
                 "Price grid per no-deviation scan")
      ->capture_default_str();
  app.add_option("--oracle-n", cfg.oracle_n, "Oracle type cells")
      ->capture_default_str();
  app.add_option("--oracle-price-n", cfg.oracle_price_n,
                 "Oracle deviation prices per audience")
      ->capture_default_str();
  app.add_option("--tol", cfg.tol, "Strictness band for deviation margins")
      ->capture_default_str();
  app.add_option("--breakeven-tol", cfg.breakeven_tol,
                 "Delayed break-even tolerance")
      ->capture_default_str();
  app.add_option("--accept-c", cfg.accept_c,
                 "Verification bound is accept-c / oracle-n")
      ->capture_default_str();
  app.add_option("--support", cfg.support,
                 "Short-lived deviation pools: continued or bounded")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads, 0 for all")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  stigma::RunConfig cfg;
  CLI::App app{"Bailout stigma equilibria, welfare and verification"};
  app.set_config("--config", "", "INI or TOML file with option values");
  app.fallthrough();
  app.require_subcommand(1);
  add_common(app, cfg);

  CLI::App* lf = app.add_subcommand("laissez-faire", "Market without bailout");
  CLI::App* sweep = app.add_subcommand("sweep", "Equilibrium sets over p_g");
  CLI::App* welfare = app.add_subcommand("welfare", "Welfare tables over p_g");
  CLI::App* verify = app.add_subcommand("verify", "Oracle verification");
  CLI::App* figure6 = app.add_subcommand(
      "figure6", "sweep with uniform types, S=1/3, I=0.1, lambda=0.2, "
                 "p_g 0.34:1.0:0.005");
  verify->add_option("--regime", cfg.regime,
                     "laissez-faire, secret, sl, ds or full-freeze")
      ->capture_default_str();
  double p2m = 0.0;
  CLI::Option* p2m_opt = verify->add_option(
      "--p2m", p2m, "Override the period-2 non-recipient offer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  if (*p2m_opt) cfg.p2m = p2m;

  try {
    if (*figure6) {
      stigma::RunConfig preset = stigma::figure6_config();
      cfg.dist = preset.dist;
      cfg.S = preset.S;
      cfg.I = preset.I;
      cfg.lambda = preset.lambda;
      cfg.pg = preset.pg;
    }
    cfg.validate();
    warn_on_validation(cfg);
    if (*lf) {
      stigma::run_laissez_faire(cfg);
      std::printf("wrote %s/laissez_faire.csv\n", cfg.out.c_str());
    } else if (*sweep || *figure6) {
      stigma::run_sweep(cfg);
      std::printf("wrote sl_set.csv ds_set.csv volumes.csv welfare.csv to %s\n",
                  cfg.out.c_str());
    } else if (*welfare) {
      stigma::run_welfare(cfg);
      std::printf("wrote welfare.csv matched.csv to %s\n", cfg.out.c_str());
    } else if (*verify) {
      stigma::VerifyOutcome v = stigma::run_verify(cfg);
      std::printf("%s: %d profile(s), worst gain %.12g, bound %.12g\n",
                  v.pass ? "PASS" : "FAIL", v.profiles, v.worst, v.bound);
      return v.pass ? kOk : kVerify;
    }
  } catch (const stigma::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const stigma::DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kConfig;
  } catch (const stigma::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s on [%.12g, %.12g]\n", e.what(),
                 e.lo(), e.hi());
    return kNumeric;
  } catch (const stigma::ConsistencyError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const stigma::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}
