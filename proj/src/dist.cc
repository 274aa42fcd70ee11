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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "stigma/errors.hpp"

namespace stigma {
namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

TypeDistribution TypeDistribution::uniform() {
  return TypeDistribution(DistributionKind::kUniform, nullptr);
}

TypeDistribution TypeDistribution::tabulated(std::vector<double> theta,
                                             std::vector<double> density) {
  if (theta.size() < 2 || theta.size() != density.size()) {
    throw DomainError("density table needs at least two (theta, f) rows");
  }
  if (theta.front() != 0.0 || theta.back() != 1.0) {
    throw DomainError("density table must span exactly [0, 1]");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(density[i]) || density[i] < 0.0) {
      throw DomainError("density table has a negative or non-finite value");
    }
    if (i > 0 && !(theta[i] > theta[i - 1])) {
      throw DomainError("density table nodes must increase strictly");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    total += 0.5 * (density[i] + density[i + 1]) * (theta[i + 1] - theta[i]);
  }
  if (!(total > 0.0)) throw DomainError("density table has zero mass");

  auto table = std::make_shared<Table>();
  table->theta = std::move(theta);
  table->density = std::move(density);
  for (double& f : table->density) f /= total;
  const std::size_t n = table->theta.size();
  table->slope.assign(n - 1, 0.0);
  table->cum_mass.assign(n, 0.0);
  table->cum_moment.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double t = table->theta[i];
    double h = table->theta[i + 1] - t;
    double f = table->density[i];
    double s = (table->density[i + 1] - f) / h;
    table->slope[i] = s;
    table->cum_mass[i + 1] = table->cum_mass[i] + f * h + 0.5 * s * h * h;
    table->cum_moment[i + 1] = table->cum_moment[i] + t * f * h +
                               0.5 * (t * s + f) * h * h + s * h * h * h / 3.0;
  }
  return TypeDistribution(DistributionKind::kTabulated, std::move(table));
}

TypeDistribution TypeDistribution::from_density(const ScalarFn& density,
                                                int nodes) {
  if (nodes < 2) throw DomainError("from_density needs at least two nodes");
  std::vector<double> theta(nodes);
  std::vector<double> f(nodes);
  for (int i = 0; i < nodes; ++i) {
    theta[i] = i == nodes - 1 ? 1.0 : static_cast<double>(i) / (nodes - 1);
    f[i] = density(theta[i]);
  }
  return tabulated(std::move(theta), std::move(f));
}

TypeDistribution TypeDistribution::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read density table '" + path + "'");
  std::vector<double> theta;
  std::vector<double> f;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first[0] == '#') continue;
    double t = 0.0;
    double v = 0.0;
    std::istringstream row(line);
    if (!(row >> t >> v)) {
      throw DomainError(path + ":" + std::to_string(line_no) +
                        ": expected two numeric columns");
    }
    theta.push_back(t);
    f.push_back(v);
  }
  return tabulated(std::move(theta), std::move(f));
}

int TypeDistribution::segment(double x) const {
  const auto& t = table_->theta;
  auto it = std::upper_bound(t.begin(), t.end(), x);
  int seg = static_cast<int>(it - t.begin()) - 1;
  return std::clamp(seg, 0, static_cast<int>(t.size()) - 2);
}

double TypeDistribution::density_in(int seg, double x) const {
  return table_->density[seg] + table_->slope[seg] * (x - table_->theta[seg]);
}

double TypeDistribution::mass_within(int seg, double a, double b) const {
  double w = b - a;
  return density_in(seg, a) * w + 0.5 * table_->slope[seg] * w * w;
}

double TypeDistribution::moment_within(int seg, double a, double b) const {
  double w = b - a;
  double fa = density_in(seg, a);
  double s = table_->slope[seg];
  return a * fa * w + 0.5 * (a * s + fa) * w * w + s * w * w * w / 3.0;
}

double TypeDistribution::cdf(double x) const { return mass(0.0, x); }

double TypeDistribution::density(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (kind_ == DistributionKind::kUniform) return 1.0;
  return std::max(0.0, density_in(segment(x), x));
}

double TypeDistribution::mass(double a, double b) const {
  a = clamp01(a);
  b = clamp01(b);
  if (b <= a) return 0.0;
  if (kind_ == DistributionKind::kUniform) return b - a;
  int ia = segment(a);
  int ib = segment(b);
  if (ia == ib) return mass_within(ia, a, b);
  const auto& t = table_->theta;
  return mass_within(ia, a, t[ia + 1]) +
         (table_->cum_mass[ib] - table_->cum_mass[ia + 1]) +
         mass_within(ib, t[ib], b);
}

double TypeDistribution::moment(double a, double b) const {
  a = clamp01(a);
  b = clamp01(b);
  if (b <= a) return 0.0;
  if (kind_ == DistributionKind::kUniform) return 0.5 * (b - a) * (b + a);
  int ia = segment(a);
  int ib = segment(b);
  if (ia == ib) return moment_within(ia, a, b);
  const auto& t = table_->theta;
  return moment_within(ia, a, t[ia + 1]) +
         (table_->cum_moment[ib] - table_->cum_moment[ia + 1]) +
         moment_within(ib, t[ib], b);
}

double TypeDistribution::quantile(double u) const {
  u = clamp01(u);
  if (kind_ == DistributionKind::kUniform) return u;
  const auto& c = table_->cum_mass;
  if (u >= c.back()) return 1.0;
  auto it = std::upper_bound(c.begin(), c.end(), u);
  int seg = std::clamp(static_cast<int>(it - c.begin()) - 1, 0,
                       static_cast<int>(c.size()) - 2);
  double r = u - c[seg];
  double f = table_->density[seg];
  double s = table_->slope[seg];
  double h = table_->theta[seg + 1] - table_->theta[seg];
  double denom = f + std::sqrt(std::max(0.0, f * f + 2.0 * s * r));
  double w = denom > 0.0 ? 2.0 * r / denom : 0.0;
  return table_->theta[seg] + std::min(w, h);
}

double TypeDistribution::mean() const { return moment(0.0, 1.0); }

double TypeDistribution::extended_mass(double a, double b) const {
  if (b <= a) return 0.0;
  double f1 = density(1.0);
  return mass(std::min(a, 1.0), std::min(b, 1.0)) +
         f1 * (std::max(b, 1.0) - std::max(a, 1.0));
}

double TypeDistribution::extended_moment(double a, double b) const {
  if (b <= a) return 0.0;
  double f1 = density(1.0);
  double lo = std::max(a, 1.0);
  double hi = std::max(b, 1.0);
  return moment(std::min(a, 1.0), std::min(b, 1.0)) +
         0.5 * f1 * (hi - lo) * (hi + lo);
}

double trunc_mean(const TypeDistribution& d, double a, double b) {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) {
    throw DomainError("trunc_mean requires 0 <= a <= b <= 1, got a=" +
                      std::to_string(a) + " b=" + std::to_string(b));
  }
  if (a == b) return a;
  if (d.kind() == DistributionKind::kUniform) return 0.5 * (a + b);
  double m = d.mass(a, b);
  if (!(m > 0.0)) return a;
  return std::clamp(d.moment(a, b) / m, a, b);
}

double lower_mean(const TypeDistribution& d, double b) {
  return trunc_mean(d, 0.0, b);
}

ValidationReport validate(const TypeDistribution& d, int grid_n) {
  if (grid_n < 16) throw DomainError("validate requires grid_n >= 16");
  ValidationReport report;

  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto density = [&d](double x) { return d.density(x); };
  report.cdf_density.worst = 0.0;
  for (int k = 0; k < 32; ++k) {
    double a = unit(rng);
    double b = unit(rng);
    if (a > b) std::swap(a, b);
    double gap = std::fabs(d.cdf(b) - d.cdf(a) -
                                integrate(density, a, b, 1e-10, 2048));
    if (gap > report.cdf_density.worst) {
      report.cdf_density.worst = gap;
      report.cdf_density.at = a;
      report.cdf_density.at2 = b;
    }
  }
  report.cdf_density.pass = report.cdf_density.worst <= 1e-9;

  // Uniform has exactly zero second differences; allow rounding noise.
  InvariantResult& lc = report.log_concavity;
  lc.worst = -std::numeric_limits<double>::infinity();
  double h = 1.0 / grid_n;
  for (int k = 1; k + 1 < grid_n; ++k) {
    double x = (k + 0.5) * h;
    double f0 = d.density(x - h);
    double f1 = d.density(x);
    double f2 = d.density(x + h);
    if (!(f0 > 0.0 && f1 > 0.0 && f2 > 0.0)) continue;
    double d2 = std::log(f0) - 2.0 * std::log(f1) + std::log(f2);
    if (d2 > lc.worst) {
      lc.worst = d2;
      lc.at = x;
    }
  }
  lc.pass = lc.worst <= 1e-12;

  InvariantResult& reg = report.regularity;
  reg.worst = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= 16; ++j) {
    double b = j / 16.0;
    double prev = 0.0;
    for (int k = 1; k < grid_n; ++k) {
      double a = b * k / grid_n;
      double g = 2.0 * trunc_mean(d, a, b) - lower_mean(d, a);
      if (k > 1 && g - prev < reg.worst) {
        reg.worst = g - prev;
        reg.at = a;
        reg.at2 = b;
      }
      prev = g;
    }
  }
  reg.pass = reg.worst >= -1e-12;
  return report;
}

}  // namespace stigma
