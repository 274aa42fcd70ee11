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

#include "stigma/dist.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "laws.hpp"
#include "stigma/errors.hpp"

namespace stigma {
namespace {

using testing::normal_trunc_mean;
using testing::truncated_normal;

TEST_CASE("uniform truncated means") {
  auto u = TypeDistribution::uniform();
  CHECK(trunc_mean(u, 0.2, 0.6) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(trunc_mean(u, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(trunc_mean(u, 0.35, 0.45) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(lower_mean(u, 2.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(lower_mean(u, 0.0) == 0.0);
  CHECK(lower_mean(u, 1.0) == 0.5);
}

TEST_CASE("trunc_mean rejects arguments outside the unit square") {
  auto u = TypeDistribution::uniform();
  CHECK_THROWS_AS(trunc_mean(u, -0.1, 0.5), DomainError);
  CHECK_THROWS_AS(trunc_mean(u, 0.6, 0.5), DomainError);
  CHECK_THROWS_AS(trunc_mean(u, 0.2, 1.2), DomainError);
  CHECK_THROWS_AS(lower_mean(u, 1.5), DomainError);
}

TEST_CASE("degenerate truncation returns the left endpoint") {
  auto u = TypeDistribution::uniform();
  CHECK(trunc_mean(u, 0.3, 0.3) == 0.3);
  auto step = TypeDistribution::tabulated({0.0, 0.5, 0.6, 1.0},
                                          {0.0, 0.0, 1.0, 1.0});
  CHECK(trunc_mean(step, 0.1, 0.4) == 0.1);
}

TEST_CASE("tabulated uniform matches the closed form") {
  auto u = TypeDistribution::uniform();
  auto t = TypeDistribution::tabulated({0.0, 0.25, 1.0}, {3.0, 3.0, 3.0});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double a = unit(rng);
    double b = unit(rng);
    if (a > b) std::swap(a, b);
    CHECK(std::fabs(trunc_mean(t, a, b) - trunc_mean(u, a, b)) <= 1e-12);
    CHECK(std::fabs(t.cdf(a) - a) <= 1e-15);
    CHECK(std::fabs(t.quantile(a) - a) <= 1e-14);
  }
}

TEST_CASE("triangle table loads and integrates exactly") {
  auto d = TypeDistribution::load_table(STIGMA_TEST_DATA "/triangle.txt");
  // f(x) = 2(1 - x): F(x) = 2x - x^2, E[theta] = 1/3.
  CHECK(d.cdf(0.3) == doctest::Approx(0.6 - 0.09).epsilon(1e-14));
  CHECK(d.mean() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  double a = 0.2;
  double b = 0.7;
  double m = (b * b - a * a) - 2.0 / 3.0 * (b * b * b - a * a * a);
  double w = (2 * b - b * b) - (2 * a - a * a);
  CHECK(trunc_mean(d, a, b) == doctest::Approx(m / w).epsilon(1e-13));
  CHECK(d.quantile(d.cdf(0.42)) == doctest::Approx(0.42).epsilon(1e-13));
  CHECK_THROWS_AS(TypeDistribution::load_table("/nonexistent/table.txt"),
                  DomainError);
}

TEST_CASE("malformed tables are rejected") {
  CHECK_THROWS_AS(TypeDistribution::tabulated({0.0, 1.0}, {1.0}),
                  DomainError);
  CHECK_THROWS_AS(TypeDistribution::tabulated({0.1, 1.0}, {1.0, 1.0}),
                  DomainError);
  CHECK_THROWS_AS(TypeDistribution::tabulated({0.0, 0.5, 0.5, 1.0},
                                              {1.0, 1.0, 1.0, 1.0}),
                  DomainError);
  CHECK_THROWS_AS(TypeDistribution::tabulated({0.0, 1.0}, {1.0, -1.0}),
                  DomainError);
  CHECK_THROWS_AS(TypeDistribution::tabulated({0.0, 1.0}, {0.0, 0.0}),
                  DomainError);
}

TEST_CASE("truncated normal agrees with the analytic normal moments") {
  auto d = truncated_normal();
  const double pairs[][2] = {{0.0, 1.0}, {0.1, 0.4}, {0.3, 0.95},
                             {0.0, 0.2}, {0.66, 1.0}, {0.5, 0.55}};
  for (const auto& p : pairs) {
    CHECK(std::fabs(trunc_mean(d, p[0], p[1]) -
                    normal_trunc_mean(p[0], p[1])) <= 1e-6);
  }
}

TEST_CASE("validate passes uniform and truncated normal") {
  auto r = validate(TypeDistribution::uniform(), 256);
  CHECK(r.cdf_density.pass);
  CHECK(r.log_concavity.pass);
  CHECK(r.regularity.pass);

  auto n = validate(truncated_normal(), 256);
  CHECK(n.cdf_density.pass);
  CHECK(n.log_concavity.pass);
  CHECK(n.regularity.pass);
  CHECK(n.log_concavity.worst < 0.0);
}

TEST_CASE("validate flags a log-convex density") {
  auto d = TypeDistribution::from_density(
      [](double x) { return std::exp(x * x); }, 1025);
  auto r = validate(d, 256);
  CHECK_FALSE(r.log_concavity.pass);
  CHECK(r.log_concavity.worst > 0.0);
  CHECK(r.cdf_density.pass);
  CHECK_THROWS_AS(validate(d, 8), DomainError);
}

TEST_CASE("trunc_mean slopes lie in (0, 1) and means stay inside") {
  for (const auto& d : {TypeDistribution::uniform(), truncated_normal()}) {
    const double h = 1e-5;
    for (int i = 1; i < 20; ++i) {
      for (int j = i + 1; j < 20; ++j) {
        double a = i / 20.0;
        double b = j / 20.0;
        double m = trunc_mean(d, a, b);
        CHECK(m >= a);
        CHECK(m <= b);
        double da = (trunc_mean(d, a + h, b) - trunc_mean(d, a - h, b)) / (2 * h);
        double db = (trunc_mean(d, a, b + h) - trunc_mean(d, a, b - h)) / (2 * h);
        CHECK(da > 0.0);
        CHECK(da < 1.0);
        CHECK(db > 0.0);
        CHECK(db < 1.0);
      }
    }
  }
}

TEST_CASE("extended law continues the density past one") {
  auto u = TypeDistribution::uniform();
  CHECK(u.extended_mass(0.5, 1.3) == doctest::Approx(0.8));
  CHECK(u.extended_moment(0.5, 1.3) ==
        doctest::Approx(0.5 * (1.3 * 1.3 - 0.25)));
  auto d = TypeDistribution::load_table(STIGMA_TEST_DATA "/triangle.txt");
  CHECK(d.extended_mass(0.9, 1.5) == doctest::Approx(d.mass(0.9, 1.0)));
}

}  // namespace
}  // namespace stigma
