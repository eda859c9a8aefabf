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

#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "interpolation.hpp"
#include "test_support.hpp"
#include "transport_density.hpp"

using namespace otd;

namespace {

TransportPlan to_single_atom(const GriddedDensity& f, const Point& y) {
  const AtomicMeasure mu = discretize_density(f);
  return solve_kp(mu, AtomicMeasure(f.grid.dim(), {{y, total_mass(mu)}}), 0.0).plan;
}

}  // namespace

TEST_CASE("interpolate plan endpoints") {
  std::mt19937_64 rng(2);
  const AtomicMeasure mu = testing::random_atoms(rng, 2, 12);
  const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 9), total_mass(mu));
  const TransportPlan plan = solve_kp(mu, nu, 0.1).plan;

  const AtomicMeasure at0 = interpolate_plan(plan, 0.0);
  REQUIRE(at0.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(at0[i].x == mu[i].x);
    CHECK(at0[i].mass == doctest::Approx(mu[i].mass).epsilon(1e-12));
  }
  const AtomicMeasure at1 = interpolate_plan(plan, 1.0);
  CHECK(at1.size() == nu.size());
  CHECK(total_mass(interpolate_plan(plan, 0.37)) == doctest::Approx(total_mass(mu)).epsilon(1e-12));
  CHECK_THROWS_AS(interpolate_plan(plan, 1.5), Error);

  const TransportPlan seg{AtomicMeasure(1, {{{0.0, 0, 0}, 1.0}}), AtomicMeasure(1, {{{1.0, 0, 0}, 1.0}}),
                          {{0, 0, 1.0}}, 1.0};
  const AtomicMeasure mid = interpolate_plan(seg, 0.3);
  REQUIRE(mid.size() == 1);
  CHECK(mid[0].x[0] == doctest::Approx(0.3));
  CHECK(mid[0].mass == 1.0);
}

TEST_CASE("assignment regions") {
  std::mt19937_64 rng(9);
  const AtomicMeasure mu = testing::random_atoms(rng, 2, 20);
  const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 6), total_mass(mu));
  const AssignmentRegions r = AssignmentRegions::from_plan(solve_kp(mu, nu, 0.0).plan);
  REQUIRE(r.regions.size() == nu.size());
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    double in = 0.0;
    for (auto [i, m] : r.regions[j]) {
      in += m;
      out[i] += m;
    }
    CHECK(in == doctest::Approx(nu[j].mass).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(out[i] == doctest::Approx(mu[i].mass).epsilon(1e-9));
}

TEST_CASE("homothety of the uniform density toward one atom") {
  const Grid g = Grid::unit(2, 16);
  const GriddedDensity f(g, std::vector<double>(g.cell_count(), 1.0));
  const AssignmentRegions r = AssignmentRegions::from_plan(to_single_atom(f, {1.0, 0.0, 0}));

  const GriddedDensity at0 = interpolant_density(f, r, 0.0);
  CHECK(at0.values == f.values);

  // t = 1/2: image box [1/2,1] x [0,1/2] with density 4
  const GriddedDensity half = interpolant_density(f, r, 0.5);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Point x = g.cell_center(c);
    CHECK(half.values[c] == doctest::Approx(x[0] > 0.5 && x[1] < 0.5 ? 4.0 : 0.0));
  }
  CHECK_THROWS_AS(interpolant_density(f, r, 1.0), Error);

  // generic t: mass conserved
  CHECK(total_mass(interpolant_density(f, r, 0.37)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolant density conserves mass on random instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const GriddedDensity f = testing::random_density(rng, Grid::unit(2, 12));
    const AtomicMeasure mu = discretize_density(f);
    const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 5), total_mass(mu));
    const AssignmentRegions r = AssignmentRegions::from_plan(solve_kp(mu, nu, 0.0).plan);
    for (double t : {0.0, 0.2, 0.55, 0.9})
      CHECK(total_mass(interpolant_density(f, r, t)) == doctest::Approx(total_mass(f)).epsilon(1e-9));
  }
  const GriddedDensity f = testing::random_density(rng, Grid::unit(2, 4));
  const AssignmentRegions wrong = AssignmentRegions::from_plan(
      solve_kp(testing::normalized(testing::random_atoms(rng, 2, 3), total_mass(f)),
               AtomicMeasure(2, {{{0.5, 0.5, 0}, total_mass(f)}}), 0.0)
          .plan);
  CHECK_THROWS_AS(interpolant_density(f, wrong, 0.3), Error);
}

TEST_CASE("single atom scaling law at dyadic times") {
  for (int d : {1, 2}) {
    const Grid g = Grid::unit(d, d == 1 ? 64 : 32);
    std::mt19937_64 rng(5);
    const GriddedDensity f = testing::random_density(rng, g, 0.1);
    const AssignmentRegions r = AssignmentRegions::from_plan(to_single_atom(f, {0.0, 0.0, 0.0}));
    for (int k : {1, 2, 3}) {
      const double t = 1.0 - std::ldexp(1.0, -k);
      const GriddedDensity ft = interpolant_density(f, r, t, g.refined(1 << k));
      for (double p : {1.5, 2.0})
        for (double q : {1.0, 2.0, LorentzParams::kInf}) {
          const LorentzParams params(p, q);
          CHECK(lorentz_quasinorm(ft, params) ==
                doctest::Approx(std::pow(1.0 - t, -params.dilation_exponent(d)) * lorentz_quasinorm(f, params))
                    .epsilon(1e-6));
        }
    }
  }
}

TEST_CASE("single atom norm curve grows with t") {
  const LorentzParams params(1.5, 2.0);
  for (int n : {64, 128}) {
    const Grid g = Grid::unit(2, n);
    const GriddedDensity f(g, std::vector<double>(g.cell_count(), 1.0));
    const AssignmentRegions r = AssignmentRegions::from_plan(to_single_atom(f, {0.3, 0.6, 0}));
    const double base = lorentz_quasinorm(f, params);
    double prev = 0.0;
    for (int k = 0; k <= 9; ++k) {
      const double t = 0.1 * k;
      const double norm = lorentz_quasinorm(interpolant_density(f, r, t), params);
      CHECK(norm > prev);
      // binning error ~ 1 / (n (1 - t)): the image must span at least ~10 cells
      if (n * (1.0 - t) >= 10.0)
        CHECK(norm == doctest::Approx(std::pow(1.0 - t, -params.dilation_exponent(2)) * base).epsilon(0.05));
      prev = norm;
    }
  }
}

TEST_CASE("sigma interpolation bound") {
  const Grid g1 = Grid::unit(1, 16);
  const TransportPlan seg{AtomicMeasure(1, {{{0.0, 0, 0}, 1.0}}), AtomicMeasure(1, {{{1.0, 0, 0}, 1.0}}),
                          {{0, 0, 1.0}}, 1.0};
  const SigmaBound b = sigma_interpolation_bound(seg, g1, 64);
  for (double v : b.lhs.values) CHECK(v == doctest::Approx(1.0));
  CHECK(b.max_defect <= 0.1);

  const AtomicMeasure m(1, {{{0.5, 0, 0}, 1.0}});
  const SigmaBound zero = sigma_interpolation_bound(TransportPlan{m, m, {{0, 0, 1.0}}, 1.0}, g1, 8);
  CHECK(zero.max_defect <= 0.0);
  for (double v : zero.lhs.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(sigma_interpolation_bound(seg, g1, 4), Error);

  std::mt19937_64 rng(77);
  const AtomicMeasure mu = testing::random_atoms(rng, 2, 30);
  const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 20), total_mass(mu));
  const TransportPlan plan = solve_kp(mu, nu, 0.0).plan;
  const SigmaBound b2 = sigma_interpolation_bound(plan, Grid::unit(2, 16), 512);
  double smax = 0.0;
  for (double v : b2.lhs.values) smax = std::max(smax, v);
  CHECK(b2.max_defect <= 0.1 * smax);
}

TEST_CASE("two-sided envelope and norm curve") {
  const LorentzParams params(1.5, 2.0);
  CHECK(two_sided_envelope(0.0, 2, params, 1.0, 5.0) == 1.0);
  CHECK(two_sided_envelope(1.0, 2, params, 5.0, 1.0) == 1.0);

  const Grid g = Grid::unit(2, 32);
  const GriddedDensity fp = testing::box_indicator(g, {0.125, 0.125, 0}, {0.5, 0.5, 0}, 1.0 / (0.375 * 0.375));
  const GriddedDensity fm = testing::box_indicator(g, {0.375, 0.25, 0}, {0.75, 0.625, 0}, 1.0 / (0.375 * 0.375));
  const std::vector<double> ts{0.1, 0.3, 0.5, 0.7, 0.9};
  CHECK_THROWS_AS(interpolant_norm_curve(fp, fm, 0.0, params, ts), Error);
  const NormCurve c = interpolant_norm_curve(fp, fm, 0.1, params, ts);
  REQUIRE(c.points.size() == ts.size());
  for (const auto& pt : c.points) CHECK(pt.norm <= pt.envelope * 1.15);
}
