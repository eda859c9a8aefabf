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
#include "ot_solver.hpp"
#include "test_support.hpp"

using namespace otd;

namespace {

AtomicMeasure line(std::initializer_list<std::pair<double, double>> pts) {
  std::vector<Atom> atoms;
  for (auto [x, m] : pts) atoms.push_back({{x, 0.0, 0.0}, m});
  return AtomicMeasure(1, atoms);
}

void check_certificate(const KpSolution& s) {
  CHECK(s.plan.marginal_violation() <= 1e-9);
  CHECK(std::fabs(duality_gap(s.plan, s.duals)) <= 1e-9 * (1.0 + std::fabs(s.cost)));
  CHECK(dual_infeasibility(s.plan, s.duals) <= 1e-9);
  CHECK(s.plan.entries.size() <= s.plan.source.size() + s.plan.target.size() - 1);
  for (const PlanEntry& e : s.plan.entries) CHECK(e.mass > 0.0);
}

}  // namespace

TEST_CASE("forced plan") {
  const KpSolution s = solve_kp(line({{0.0, 1.0}}), line({{1.0, 1.0}}), 0.0);
  REQUIRE(s.plan.entries.size() == 1);
  CHECK(s.plan.entries[0].mass == 1.0);
  CHECK(s.cost == doctest::Approx(1.0));
  check_certificate(s);
}

TEST_CASE("identity coupling") {
  std::mt19937_64 rng(1);
  const AtomicMeasure m = testing::random_atoms(rng, 2, 30);
  for (double eps : {0.0, 0.3}) {
    const KpSolution s = solve_kp(m, m, eps);
    CHECK(s.cost == doctest::Approx(0.0));
    for (const PlanEntry& e : s.plan.entries) CHECK(e.source == e.target);
    check_certificate(s);
  }
}

TEST_CASE("2x2 example") {
  const AtomicMeasure mu = line({{0.0, 0.5}, {1.0, 0.5}});
  const AtomicMeasure nu = line({{0.4, 0.5}, {0.6, 0.5}});
  // monotone pairing moves 0.4 + 0.4, crossing 0.6 + 0.6: the optimum is 0.4
  const KpSolution s0 = solve_kp(mu, nu, 0.0);
  CHECK(s0.cost == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(dual_value(s0.plan, s0.duals) == doctest::Approx(0.4).epsilon(1e-12));
  const TransportPlan crossing{mu, nu, {{0, 1, 0.5}, {1, 0, 0.5}}, 1.0};
  CHECK(crossing.cost() == doctest::Approx(0.6));
  check_certificate(s0);

  const KpSolution s1 = solve_kp(mu, nu, 0.1);
  CHECK(s1.cost == doctest::Approx(std::pow(0.4, 1.1)).epsilon(1e-12));
  REQUIRE(s1.plan.entries.size() == 2);
  for (const PlanEntry& e : s1.plan.entries) CHECK(e.source == e.target);  // monotone
  check_certificate(s1);
}

TEST_CASE("duality gap with zero duals equals the cost") {
  const KpSolution s = solve_kp(line({{0.0, 1.0}}), line({{0.7, 1.0}}), 0.0);
  const DualPotentials zero{{0.0}, {0.0}, 1.0};
  CHECK(duality_gap(s.plan, zero) == doctest::Approx(0.7));
}

TEST_CASE("errors") {
  try {
    solve_kp(line({{0.0, 1.0}}), line({{1.0, 2.0}}), 0.0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMassImbalance);
    CHECK(std::string(e.what()).find("mass imbalance") != std::string::npos);
  }
  CHECK_THROWS_AS(solve_kp(AtomicMeasure(1), line({{1.0, 1.0}}), 0.0), Error);
  CHECK_THROWS_AS(solve_kp(line({{0.0, 1.0}}), line({{1.0, 1.0}}), -0.5), Error);
}

TEST_CASE("random instances certify and match brute force") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 2;
    const double eps = trial % 3 == 0 ? 0.0 : 0.1;
    const AtomicMeasure mu = testing::random_atoms(rng, dim, 20 + trial);
    const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, dim, 15 + 2 * trial), total_mass(mu));
    check_certificate(solve_kp(mu, nu, eps));
  }
  for (int n = 1; n <= 6; ++n) {
    for (double eps : {0.0, 0.2}) {
      const AtomicMeasure mu = testing::random_atoms(rng, 2, n, true);
      const AtomicMeasure nu = testing::random_atoms(rng, 2, n, true);
      const KpSolution s = solve_kp(mu, nu, eps);
      CHECK(s.cost == doctest::Approx(oracle::brute_transport(mu, nu, eps).cost).epsilon(1e-9));
    }
  }
}

TEST_CASE("lip-1 check") {
  const AtomicMeasure two = line({{0.0, 0.5}, {1.0, 0.5}});
  CHECK(check_lip1(two, DualPotentials{{0.0, 0.0}, {}, 1.0}) == 0.0);
  CHECK(check_lip1(two, DualPotentials{{0.0, 2.0}, {}, 1.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(check_lip1(two, DualPotentials{{0.0, 0.0}, {}, 1.1}), Error);

  std::mt19937_64 rng(8);
  const AtomicMeasure mu = testing::random_atoms(rng, 2, 40);
  const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 25), total_mass(mu));
  const KpSolution s = solve_kp(mu, nu, 0.0);
  CHECK(check_lip1(s.plan.source, s.duals) <= 1e-9);
}

TEST_CASE("transport rays") {
  const AtomicMeasure m = line({{0.2, 1.0}});
  const KpSolution same = solve_kp(m, m, 0.0);
  CHECK(extract_rays(same.plan, same.duals).empty());

  const KpSolution s = solve_kp(line({{0.0, 1.0}}), line({{1.0, 1.0}}), 0.0);
  const auto rays = extract_rays(s.plan, s.duals);
  REQUIRE(rays.size() == 1);
  CHECK(rays[0].drop == doctest::Approx(1.0));

  // Monotone 2x2 plan with the eps = 0 duals: rays disjoint, drop = length.
  const AtomicMeasure mu = line({{0.0, 0.5}, {1.0, 0.5}});
  const AtomicMeasure nu = line({{0.4, 0.5}, {0.6, 0.5}});
  const KpSolution s0 = solve_kp(mu, nu, 0.0);
  const TransportPlan monotone{mu, nu, {{0, 0, 0.5}, {1, 1, 0.5}}, 1.0};
  const auto r = extract_rays(monotone, s0.duals);
  REQUIRE(r.size() == 2);
  for (const Ray& ray : r) CHECK(ray.drop == doctest::Approx(ray.length).epsilon(1e-9));
  CHECK_FALSE(segments_cross_in_interior(r[0], r[1], 1));

  std::mt19937_64 rng(17);
  const AtomicMeasure a = testing::random_atoms(rng, 2, 30);
  const AtomicMeasure b = testing::normalized(testing::random_atoms(rng, 2, 30), total_mass(a));
  const KpSolution sr = solve_kp(a, b, 0.0);
  for (const Ray& ray : extract_rays(sr.plan, sr.duals)) CHECK(std::fabs(ray.drop - ray.length) <= 1e-9);
}

TEST_CASE("eps -> 0 cost convergence") {
  std::mt19937_64 rng(23);
  const AtomicMeasure mu = testing::random_atoms(rng, 2, 25);
  const AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, 2, 25), total_mass(mu));
  const double c0 = solve_kp(mu, nu, 0.0).cost;
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.5, 0.2, 0.1, 0.05}) {
    const double gap = std::fabs(solve_kp(mu, nu, eps).plan.cost(1.0) - c0);
    CHECK(gap <= prev);
    prev = gap;
  }
}
