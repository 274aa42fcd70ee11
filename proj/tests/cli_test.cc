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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "csv.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;
using stigma::testing::read_csv;
using stigma::testing::slurp;

struct Run {
  int status = -1;
  std::string output;
};

Run run(const std::string& args) {
  std::string cmd = std::string(STIGMA_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string out_dir(const std::string& name) {
  fs::path p = fs::path(STIGMA_TEST_OUT) / name;
  fs::remove_all(p);
  return p.string();
}

TEST_CASE("help lists subcommands and defaults") {
  Run r = run("--help");
  CHECK(r.status == 0);
  for (const char* s : {"laissez-faire", "sweep", "welfare", "verify", "figure6",
                        "--oracle-n", "[0.34:1.0:0.005]", "[2000]", "--config"}) {
    CHECK_MESSAGE(r.output.find(s) != std::string::npos, s);
  }
}

TEST_CASE("figure6 runs are byte-identical") {
  std::string a = out_dir("cli_a");
  std::string b = out_dir("cli_b");
  CHECK(run("figure6 --out " + a).status == 0);
  CHECK(run("figure6 --out " + b + " --threads 1").status == 0);
  for (const char* f : {"sl_set.csv", "ds_set.csv", "volumes.csv", "welfare.csv"}) {
    std::string x = slurp(a + "/" + f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b + "/" + f));
  }
}

TEST_CASE("verify exit status") {
  std::string dir = out_dir("cli_verify");
  Run ds = run("verify --pg 0.9 --out " + dir);
  CHECK(ds.status == 0);
  CHECK(ds.output.find("PASS") != std::string::npos);
  Run stale = run("verify --pg 0.9 --p2m 0.333333333333 --out " + dir);
  CHECK(stale.status == 4);
  CHECK(stale.output.find("FAIL") != std::string::npos);
  CHECK(run("verify --regime laissez-faire --S 0.05 --out " + dir).status == 0);
  CHECK(run("verify --regime full-freeze --S 0.05 --pg 0.4 --out " + dir).status == 0);
}

TEST_CASE("configuration errors exit with status 2") {
  std::string dir = out_dir("cli_bad");
  Run s = run("sweep --S -1 --out " + dir);
  CHECK(s.status == 2);
  CHECK(s.output.find("S:") != std::string::npos);
  Run pg = run("sweep --pg 0.5:0.4:0.1 --out " + dir);
  CHECK(pg.status == 2);
  CHECK(pg.output.find("pg:") != std::string::npos);
  CHECK(run("sweep --dist table:/nonexistent --out " + dir).status == 2);
  CHECK(run("sweep --bogus").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("verify --regime sl --pg 0.95 --out " + dir).status == 2);
}

TEST_CASE("options from a config file") {
  std::string dir = out_dir("cli_config");
  fs::create_directories(dir);
  std::string ini = dir + "/run.ini";
  std::ofstream(ini) << "S = 0.05\nI = 0.1\nout = \"" << dir << "\"\n";
  Run r = run("laissez-faire --config " + ini);
  REQUIRE(r.status == 0);
  auto lf = read_csv(dir + "/laissez_faire.csv");
  REQUIRE(lf.rows.size() == 1);
  CHECK(lf.rows[0]["S"] == "0.05");
  CHECK(lf.rows[0]["frozen"] == "1");
  CHECK(lf.rows[0]["grid_theta0"] == "0");
}

TEST_CASE("numeric tables warn on assumption failures") {
  std::string dir = out_dir("cli_warn");
  std::string table = dir + "/bimodal.txt";
  fs::create_directories(dir);
  std::ofstream(table) << "0 1\n0.25 2\n0.5 0.2\n0.75 2\n1 1\n";
  Run r = run("laissez-faire --dist table:" + table + " --out " + dir);
  CHECK(r.status == 0);
  CHECK(r.output.find("warning: log-concavity") != std::string::npos);
}

}  // namespace
