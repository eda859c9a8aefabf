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

#include "ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"
#include "network_simplex.hpp"

namespace otd {

namespace {

constexpr double kBalanceTolerance = 1e-9;

double cost_between(const TransportPlan& plan, std::size_t i, std::size_t j) {
  return power_cost(distance(plan.source[i].x, plan.target[j].x, plan.dim()), plan.cost_exponent);
}

void check_same_instance(const TransportPlan& plan, const DualPotentials& duals) {
  require(duals.u.size() == plan.source.size() && duals.w.size() == plan.target.size(), ErrorCode::kMismatch,
          "potentials do not match the plan's measures");
  require(duals.cost_exponent == plan.cost_exponent, ErrorCode::kMismatch,
          "potentials and plan were computed for different cost exponents");
}

}  // namespace

double power_cost(double dist, double exponent) {
  if (exponent == 1.0) return dist;
  if (dist == 0.0) return 0.0;
  return std::pow(dist, exponent);
}

double TransportPlan::cost(double exponent) const {
  double s = 0.0;
  for (const PlanEntry& e : entries) s += e.mass * power_cost(length(e), exponent);
  return s;
}

double TransportPlan::marginal_violation() const {
  std::vector<double> rows(source.size(), 0.0);
  std::vector<double> cols(target.size(), 0.0);
  for (const PlanEntry& e : entries) {
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) worst = std::max(worst, std::fabs(rows[i] - source[i].mass));
  for (std::size_t j = 0; j < cols.size(); ++j) worst = std::max(worst, std::fabs(cols[j] - target[j].mass));
  const double total = total_mass(source);
  return total > 0.0 ? worst / total : worst;
}

KpSolution solve_kp(const AtomicMeasure& mu, const AtomicMeasure& nu, double eps) {
  require(!mu.empty() && !nu.empty(), ErrorCode::kEmptyMeasure, "empty measure");
  require(mu.dim() == nu.dim(), ErrorCode::kMismatch, "source and target dimensions differ");
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::kInvalidArgument, "cost exponent offset eps must be >= 0");
  const double mass_mu = total_mass(mu);
  const double mass_nu = total_mass(nu);
  require(std::fabs(mass_mu - mass_nu) <= kBalanceTolerance * mass_mu, ErrorCode::kMassImbalance,
          "mass imbalance: source " + std::to_string(mass_mu) + " vs target " + std::to_string(mass_nu));

  const int dim = mu.dim();
  const double exponent = 1.0 + eps;
  std::vector<double> supply(mu.size());
  std::vector<double> demand(nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) supply[i] = mu[i].mass;
  const double scale = mass_mu / mass_nu;
  for (std::size_t j = 0; j < nu.size(); ++j) demand[j] = nu[j].mass * scale;

  auto cost = [&mu, &nu, dim, exponent](std::size_t i, std::size_t j) {
    return power_cost(distance(mu[i].x, nu[j].x, dim), exponent);
  };
  detail::NetworkSimplex simplex(supply, demand, cost);
  simplex.run();

  KpSolution sol{TransportPlan{mu, nu, {}, exponent}, DualPotentials{{}, {}, exponent}, 0.0, simplex.iterations()};
  for (const auto& f : simplex.flows()) sol.plan.entries.push_back(PlanEntry{f.source, f.target, f.amount});

  // Tighten the tree potentials by c-transforms: u_i = min_j c_ij + w_j, then
  // w_j = max_i u_i - c_ij. Both steps keep feasibility and do not lower the dual value.
  auto& u = sol.duals.u;
  auto& w = sol.duals.w;
  w.resize(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) w[j] = -simplex.target_potential(j);
  u.assign(mu.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) u[i] = std::min(u[i], simplex.arc_cost(i, j) + w[j]);
  std::fill(w.begin(), w.end(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) w[j] = std::max(w[j], u[i] - simplex.arc_cost(i, j));

  const double shift = *std::min_element(u.begin(), u.end());
  for (double& x : u) x -= shift;
  for (double& x : w) x -= shift;

  sol.cost = sol.plan.cost();
  return sol;
}

double dual_value(const TransportPlan& plan, const DualPotentials& duals) {
  check_same_instance(plan, duals);
  double s = 0.0;
  for (std::size_t i = 0; i < plan.source.size(); ++i) s += duals.u[i] * plan.source[i].mass;
  for (std::size_t j = 0; j < plan.target.size(); ++j) s -= duals.w[j] * plan.target[j].mass;
  return s;
}

double duality_gap(const TransportPlan& plan, const DualPotentials& duals) {
  return plan.cost() - dual_value(plan, duals);
}

double dual_infeasibility(const TransportPlan& plan, const DualPotentials& duals) {
  check_same_instance(plan, duals);
  double worst = 0.0;
  for (std::size_t i = 0; i < plan.source.size(); ++i)
    for (std::size_t j = 0; j < plan.target.size(); ++j)
      worst = std::max(worst, duals.u[i] - duals.w[j] - cost_between(plan, i, j));
  return worst;
}

double check_lip1(const AtomicMeasure& points, const DualPotentials& duals,
                  std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  require(duals.cost_exponent == 1.0, ErrorCode::kUnsupported, "Lip-1 only meaningful at eps=0");
  require(duals.u.size() == points.size(), ErrorCode::kMismatch, "potentials do not match the points");
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    require(a < points.size() && b < points.size(), ErrorCode::kInvalidArgument, "pair index out of range");
    worst = std::max(worst, std::fabs(duals.u[a] - duals.u[b]) - distance(points[a].x, points[b].x, points.dim()));
  }
  return worst;
}

double check_lip1(const AtomicMeasure& points, const DualPotentials& duals) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) pairs.emplace_back(a, b);
  if (pairs.empty()) {
    require(duals.cost_exponent == 1.0, ErrorCode::kUnsupported, "Lip-1 only meaningful at eps=0");
    return 0.0;
  }
  return check_lip1(points, duals, pairs);
}

std::vector<Ray> extract_rays(const TransportPlan& plan, const DualPotentials& duals) {
  check_same_instance(plan, duals);
  std::vector<Ray> rays;
  for (const PlanEntry& e : plan.entries) {
    const double len = plan.length(e);
    if (!(len > 0.0)) continue;
    rays.push_back(Ray{e.source, e.target, plan.source[e.source].x, plan.target[e.target].x, e.mass, len,
                       duals.u[e.source] - duals.w[e.target]});
  }
  return rays;
}

namespace {

double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

Point sub(const Point& a, const Point& b) { return Point{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Point along(const Point& p, const Point& d, double t) {
  return Point{p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]};
}

}  // namespace

bool segments_cross_in_interior(const Ray& a, const Ray& b, int dim, double tol) {
  const Point d1 = sub(a.to, a.from);
  const Point d2 = sub(b.to, b.from);
  const Point r = sub(a.from, b.from);
  const double aa = dot(d1, d1, dim);
  const double bb = dot(d2, d2, dim);
  const double ab = dot(d1, d2, dim);
  const double scale = std::max(1.0, std::sqrt(std::max(aa, bb)));
  const double denom = aa * bb - ab * ab;

  if (denom <= tol * tol * aa * bb) {
    // parallel: overlap along a only matters when the lines coincide
    const double t0 = -dot(r, d1, dim) / aa;
    const Point foot = along(a.from, d1, t0);
    if (distance(foot, b.from, dim) > tol * scale) return false;
    const double s0 = dot(sub(b.from, a.from), d1, dim) / aa;
    const double s1 = dot(sub(b.to, a.from), d1, dim) / aa;
    const double lo = std::max(0.0, std::min(s0, s1));
    const double hi = std::min(1.0, std::max(s0, s1));
    if (hi - lo > tol) return true;
    if (hi < lo - tol) return false;
    // touching at a single point: interior to a, or interior to b
    const double s = 0.5 * (lo + hi);
    if (s > tol && s < 1.0 - tol) return true;
    const Point p = along(a.from, d1, s);
    const double t = dot(sub(p, b.from), d2, dim) / bb;
    return t > tol && t < 1.0 - tol;
  }

  const double c1 = dot(d1, r, dim);
  const double c2 = dot(d2, r, dim);
  double s = std::clamp((ab * c2 - bb * c1) / denom, 0.0, 1.0);
  double t = std::clamp((ab * s + c2) / bb, 0.0, 1.0);
  s = std::clamp((ab * t - c1) / aa, 0.0, 1.0);
  const Point pa = along(a.from, d1, s);
  const Point pb = along(b.from, d2, t);
  if (distance(pa, pb, dim) > tol * scale) return false;
  return (s > tol && s < 1.0 - tol) || (t > tol && t < 1.0 - tol);
}

}  // namespace otd
