// Copyright 2026 The otdensity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "lorentz.hpp"
#include "test_support.hpp"

using namespace otd;

namespace {

constexpr double kInf = LorentzParams::kInf;

GriddedDensity two_level() { return GriddedDensity(Grid::unit(1, 2), {1.0, 3.0}); }

GriddedDensity indicator(double m, int n = 64) {
  // measure-m indicator on [0,1]: the first m*n cells
  GriddedDensity f(Grid::unit(1, n));
  for (int c = 0; c < static_cast<int>(std::lround(m * n)); ++c) f.values[c] = 1.0;
  return f;
}

double indicator_quasinorm(double m, double p, double q) {
  return std::isinf(q) ? std::pow(m, 1.0 / p) : std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
}

double indicator_maximal(double m, double p, double q) {
  const double pc = p / (p - 1.0);
  return std::isinf(q) ? std::pow(m, 1.0 / p) : std::pow(p * pc / q, 1.0 / q) * std::pow(m, 1.0 / p);
}

}  // namespace

TEST_CASE("params") {
  const LorentzParams a(1.5, 2.0);
  CHECK(1.0 / a.p() + 1.0 / a.p_conjugate() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.dilation_exponent(2) == doctest::Approx(2.0 / 3.0));
  CHECK(LorentzParams(2.0, kInf).q_infinite());
  CHECK_THROWS_AS(LorentzParams(1.0, 2.0), Error);
  CHECK_THROWS_AS(LorentzParams(kInf, 2.0), Error);
  CHECK_THROWS_AS(LorentzParams(2.0, 0.5), Error);
}

TEST_CASE("distribution function") {
  const StepProfile zero = distribution_function(GriddedDensity(Grid::unit(1, 4)));
  CHECK(zero(0.5) == 0.0);

  const StepProfile ind = distribution_function(indicator(0.25));
  CHECK(ind(0.5) == doctest::Approx(0.25));
  CHECK(ind(1.0) == doctest::Approx(0.25));  // >= makes lambda left-continuous
  CHECK(ind(1.0 + 1e-12) == 0.0);

  const StepProfile lam = distribution_function(two_level());
  CHECK(lam(0.5) == 1.0);
  CHECK(lam(1.0) == 1.0);
  CHECK(lam(2.0) == 0.5);
  CHECK(lam(3.0) == 0.5);
  CHECK(lam(3.5) == 0.0);
}

TEST_CASE("decreasing rearrangement") {
  const StepProfile ind = decreasing_rearrangement(indicator(0.5));
  CHECK(ind(0.2) == 1.0);
  CHECK(ind(0.5) == 0.0);

  const StepProfile star = decreasing_rearrangement(two_level());
  CHECK(star(0.0) == 3.0);
  CHECK(star(0.49) == 3.0);
  CHECK(star(0.5) == 1.0);
  CHECK(star(0.99) == 1.0);
  CHECK(star(1.0) == 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const GriddedDensity f = testing::random_density(rng, Grid::unit(2, 11));
    const StepProfile s = decreasing_rearrangement(f);
    CHECK(s.integral() == doctest::Approx(total_mass(f)).epsilon(1e-13));

    // Sorting oracle: levels are the distinct positive values, descending.
    std::vector<double> vals;
    for (double v : f.values)
      if (v > 0.0) vals.push_back(v);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    vals.push_back(0.0);
    CHECK(s.levels == vals);
  }
}

TEST_CASE("indicator closed forms") {
  for (double m : {0.25, 0.5, 1.0}) {
    for (double p : {1.5, 2.0, 3.0}) {
      for (double q : {1.0, 2.0, p, kInf}) {
        const LorentzParams params(p, q);
        const GriddedDensity f = indicator(m);
        CHECK(lorentz_quasinorm(f, params) == doctest::Approx(indicator_quasinorm(m, p, q)).epsilon(1e-12));
        CHECK(maximal_quasinorm(f, params) == doctest::Approx(indicator_maximal(m, p, q)).epsilon(1e-10));
      }
    }
  }
  CHECK(norm_equivalence_check(indicator(0.5), LorentzParams(2, 2)).ratio == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("zero density") {
  const GriddedDensity z(Grid::unit(2, 3));
  CHECK(lorentz_quasinorm(z, LorentzParams(2, 2)) == 0.0);
  CHECK(maximal_quasinorm(z, LorentzParams(2, kInf)) == 0.0);
  try {
    norm_equivalence_check(z, LorentzParams(2, 2));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("ratio undefined") != std::string::npos);
  }
}

TEST_CASE("homogeneity, L^p agreement, equimeasurability and equivalence") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const GriddedDensity f = testing::random_density(rng, Grid::unit(2, 32));
    GriddedDensity scaled = f;
    for (double& v : scaled.values) v *= 2.5;
    for (double p : {1.5, 2.0, 3.0}) {
      CHECK(lorentz_quasinorm(f, LorentzParams(p, p)) == doctest::Approx(lp_norm(f, p)).epsilon(1e-10));
      for (double q : {1.0, 2.0, p, kInf}) {
        const LorentzParams params(p, q);
        const double n = lorentz_quasinorm(f, params);
        CHECK(lorentz_quasinorm(scaled, params) == doctest::Approx(2.5 * n).epsilon(1e-12));
        CHECK(lorentz_quasinorm_from_rearrangement(decreasing_rearrangement(f), params) ==
              doctest::Approx(n).epsilon(1e-10));
        CHECK(norm_equivalence_check(f, params).within);
      }
      CHECK(lorentz_quasinorm(f, LorentzParams(p, kInf)) <= lorentz_quasinorm(f, LorentzParams(p, p)) + 1e-12);
    }
  }
}

TEST_CASE("maximal function") {
  const StepProfile star = decreasing_rearrangement(two_level());
  CHECK(maximal_function(star, 0.25) == doctest::Approx(3.0));
  CHECK(maximal_function(star, 1.0) == doctest::Approx(2.0));
  CHECK(maximal_function(star, 4.0) == doctest::Approx(0.5));
}

TEST_CASE("dilation law on a grid-exact homothety") {
  // g(x) = 4 f(2x): ratio 1/2 in d = 2, cell (i,j) of the 16-grid maps onto cell (i,j) of the 32-grid
  const Grid coarse_grid = Grid::unit(2, 16);
  const Grid fine_grid = Grid::unit(2, 32);
  GriddedDensity f(coarse_grid), g(fine_grid);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const double v = std::floor(testing::uniform(rng, 1.0, 6.0));
      f.values[coarse_grid.ravel({i, j, 0})] = v;
      g.values[fine_grid.ravel({i, j, 0})] = 4.0 * v;
    }
  for (double p : {1.5, 2.0, 3.0})
    for (double q : {1.0, 2.0, kInf}) {
      const LorentzParams params(p, q);
      CHECK(lorentz_quasinorm(g, params) ==
            doctest::Approx(std::pow(0.5, -params.dilation_exponent(2)) * lorentz_quasinorm(f, params))
                .epsilon(1e-10));
    }
}
