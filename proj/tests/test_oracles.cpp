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
#include "oracles.hpp"
#include "test_support.hpp"
#include "transport_density.hpp"

using namespace otd;

TEST_CASE("uniform01 is the documented bit recipe") {
  std::mt19937_64 a(1), b(1);
  for (int k = 0; k < 100; ++k) {
    const double u = oracle::uniform01(a);
    CHECK(u == static_cast<double>(b() >> 11) / 9007199254740992.0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("mc sigma on the unit segment") {
  const TransportPlan seg{AtomicMeasure(1, {{{0.0, 0, 0}, 1.0}}), AtomicMeasure(1, {{{1.0, 0, 0}, 1.0}}),
                          {{0, 0, 1.0}}, 1.0};
  const oracle::McSigma mc = oracle::mc_sigma(seg, Grid::unit(1, 4), 1'000'000, 7);
  for (double v : mc.sigma.values) CHECK(std::fabs(v - 1.0) <= 0.01);

  const AtomicMeasure m(1, {{{0.5, 0, 0}, 1.0}});
  const oracle::McSigma zero = oracle::mc_sigma(TransportPlan{m, m, {{0, 0, 1.0}}, 1.0}, Grid::unit(1, 4), 10'000, 7);
  for (double v : zero.sigma.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(oracle::mc_sigma(seg, Grid::unit(1, 4), 100, 7), Error);
  CHECK_THROWS_AS(oracle::mc_sigma(seg, Grid::unit(1, 4), 20'000'000, 7), Error);
}

TEST_CASE("mc sigma agrees with the rasterizer and is seeded") {
  std::mt19937_64 rng(101);
  const AtomicMeasure mu = testing::random_atoms(rng, 2, 20);
  const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 15), total_mass(mu));
  const TransportPlan plan = solve_kp(mu, nu, 0.0).plan;
  const Grid g = Grid::unit(2, 16);
  const oracle::McSigma a = oracle::mc_sigma(plan, g, 1'000'000, 3);
  const oracle::McSigma b = oracle::mc_sigma(plan, g, 1'000'000, 3);
  CHECK(a.sigma.values == b.sigma.values);
  CHECK(l1_distance(a.sigma, rasterize_sigma(plan, g)) <= 3.0 * a.l1_std_error);
}

TEST_CASE("brute transport") {
  const AtomicMeasure one(1, {{{0.2, 0, 0}, 1.0}});
  const AtomicMeasure other(1, {{{0.9, 0, 0}, 1.0}});
  CHECK(oracle::brute_transport(one, other, 0.0).cost == doctest::Approx(0.7));

  const AtomicMeasure mu(1, {{{0.0, 0, 0}, 0.5}, {{1.0, 0, 0}, 0.5}});
  const AtomicMeasure nu(1, {{{0.4, 0, 0}, 0.5}, {{0.6, 0, 0}, 0.5}});
  const oracle::BruteTransport bt = oracle::brute_transport(mu, nu, 0.0);
  CHECK(bt.cost == doctest::Approx(0.4));
  CHECK(bt.permutation == std::vector<std::size_t>{0, 1});

  std::mt19937_64 rng(4);
  const AtomicMeasure a = testing::random_atoms(rng, 2, 6, true);
  const AtomicMeasure b = testing::random_atoms(rng, 2, 6, true);
  CHECK(oracle::brute_transport(a, b, 0.2).cost == doctest::Approx(solve_kp(a, b, 0.2).cost).epsilon(1e-9));

  try {
    oracle::brute_transport(testing::random_atoms(rng, 1, 9, true), testing::random_atoms(rng, 1, 9, true), 0.0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("oracle size cap") != std::string::npos);
  }
}

TEST_CASE("sampled rearrangement") {
  const GriddedDensity constant(Grid::unit(2, 4), std::vector<double>(16, 2.0));
  const StepProfile c = oracle::sampled_rearrangement(constant, 100'000, 1);
  REQUIRE(c.levels.size() == 2);
  CHECK(c.levels[0] == 2.0);
  CHECK(c.breakpoints[0] == doctest::Approx(1.0));

  GriddedDensity ind(Grid::unit(1, 2), {1.0, 0.0});
  const StepProfile i = oracle::sampled_rearrangement(ind, 100'000, 2);
  REQUIRE(i.breakpoints.size() == 1);
  CHECK(std::fabs(i.breakpoints[0] - 0.5) <= 0.01);

  const StepProfile two = oracle::sampled_rearrangement(GriddedDensity(Grid::unit(1, 2), {1.0, 3.0}), 100'000, 3);
  REQUIRE(two.levels.size() == 3);
  CHECK(two.levels[0] == 3.0);
  CHECK(two.levels[1] == 1.0);
  CHECK(std::fabs(two.breakpoints[0] - 0.5) <= 0.01);

  const StepProfile again = oracle::sampled_rearrangement(GriddedDensity(Grid::unit(1, 2), {1.0, 3.0}), 100'000, 3);
  CHECK(again.breakpoints == two.breakpoints);
  CHECK(oracle::dkw_radius(100'000, 0.01) == doctest::Approx(std::sqrt(std::log(200.0) / 200'000.0)));
}
