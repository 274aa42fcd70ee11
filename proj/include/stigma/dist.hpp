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

#ifndef STIGMA_DIST_HPP_
#define STIGMA_DIST_HPP_

#include <memory>
#include <string>
#include <vector>

#include "stigma/numeric.hpp"

namespace stigma {

enum class DistributionKind { kUniform, kTabulated };

// Law of the asset quality theta on [0, 1].
//
// The uniform law is evaluated in closed form. A tabulated law carries a
// density that is linear between nodes; mass, first moment and quantile are
// integrated exactly on each segment. Copies share the immutable table.
class TypeDistribution {
 public:
  static TypeDistribution uniform();

  // Nodes must start at 0, end at 1 and increase strictly; densities must be
  // nonnegative with positive total mass. The table is rescaled to unit mass.
  static TypeDistribution tabulated(std::vector<double> theta,
                                    std::vector<double> density);

  // Samples an (unnormalized) density at `nodes` equally spaced points.
  static TypeDistribution from_density(const ScalarFn& density, int nodes);

  // Two columns (theta, density) separated by whitespace or commas. Lines
  // starting with '#' are ignored.
  static TypeDistribution load_table(const std::string& path);

  DistributionKind kind() const { return kind_; }

  // Arguments outside [0, 1] are clamped.
  double cdf(double x) const;
  double density(double x) const;

  // Probability of [a, b] and integral of theta * f over [a, b], a <= b.
  double mass(double a, double b) const;
  double moment(double a, double b) const;

  double quantile(double u) const;
  double mean() const;

  // The law continued past 1 with constant density f(1). Used only by the
  // continued-support convention of the deviation scans.
  double extended_mass(double a, double b) const;
  double extended_moment(double a, double b) const;

 private:
  struct Table {
    std::vector<double> theta;
    std::vector<double> density;
    std::vector<double> slope;
    std::vector<double> cum_mass;
    std::vector<double> cum_moment;
  };

  TypeDistribution(DistributionKind kind, std::shared_ptr<const Table> table)
      : kind_(kind), table_(std::move(table)) {}

  int segment(double x) const;
  double density_in(int seg, double x) const;
  double mass_within(int seg, double a, double b) const;
  double moment_within(int seg, double a, double b) const;

  DistributionKind kind_;
  std::shared_ptr<const Table> table_;
};

// E[theta | a <= theta <= b]. Returns a for a degenerate range (a == b or zero
// mass). Throws DomainError unless 0 <= a <= b <= 1.
double trunc_mean(const TypeDistribution& d, double a, double b);

// E[theta | theta <= b]; 0 when b == 0.
double lower_mean(const TypeDistribution& d, double b);

struct InvariantResult {
  bool pass = true;
  double worst = 0.0;  // worst observed statistic
  double at = 0.0;     // where it was observed
  double at2 = 0.0;    // second coordinate, when the check has two
};

struct ValidationReport {
  InvariantResult cdf_density;
  InvariantResult log_concavity;
  InvariantResult regularity;
  bool all_pass() const {
    return cdf_density.pass && log_concavity.pass && regularity.pass;
  }
};

// Spot checks of the standing assumptions on grid_n points (grid_n >= 16):
// cdf against quadrature of the density, second differences of log f, and
// monotonicity of a -> 2 trunc_mean(a, b) - lower_mean(a) for fixed b.
ValidationReport validate(const TypeDistribution& d, int grid_n = 256);

}  // namespace stigma

#endif  // STIGMA_DIST_HPP_
