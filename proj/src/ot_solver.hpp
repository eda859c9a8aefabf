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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace otd {

struct PlanEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Sparse coupling between two atomic measures, tagged with the cost exponent
/// 1+eps it was optimised for.
struct TransportPlan {
  AtomicMeasure source;
  AtomicMeasure target;
  std::vector<PlanEntry> entries;
  double cost_exponent = 1.0;

  int dim() const { return source.dim(); }
  double length(const PlanEntry& e) const { return distance(source[e.source].x, target[e.target].x, dim()); }
  /// sum gamma_ij |x_i - y_j|^exponent
  double cost(double exponent) const;
  double cost() const { return cost(cost_exponent); }
  /// Largest |marginal - prescribed mass| relative to the total mass.
  double marginal_violation() const;
};

/// u on source atoms, w on target atoms, feasible when u_i - w_j <= c_ij.
struct DualPotentials {
  std::vector<double> u;
  std::vector<double> w;
  double cost_exponent = 1.0;
};

struct KpSolution {
  TransportPlan plan;
  DualPotentials duals;
  double cost = 0.0;
  std::uint64_t pivots = 0;
};

/// |x - y|^exponent, with 0^exponent = 0.
double power_cost(double dist, double exponent);

/// Exact optimal plan and potentials for the cost |x-y|^{1+eps}.
KpSolution solve_kp(const AtomicMeasure& mu, const AtomicMeasure& nu, double eps);

double dual_value(const TransportPlan& plan, const DualPotentials& duals);

/// primal - dual; nonnegative for feasible duals, ~0 at the optimum.
double duality_gap(const TransportPlan& plan, const DualPotentials& duals);

/// Largest violation of u_i - w_j <= c_ij over all pairs.
double dual_infeasibility(const TransportPlan& plan, const DualPotentials& duals);

/// Largest positive excess |u_a - u_b| - |x_a - x_b| over the given pairs; 0 if none.
double check_lip1(const AtomicMeasure& points, const DualPotentials& duals,
                  std::span<const std::pair<std::size_t, std::size_t>> pairs);
/// Same, over all pairs of source atoms.
double check_lip1(const AtomicMeasure& points, const DualPotentials& duals);

struct Ray {
  std::size_t source;
  std::size_t target;
  Point from;
  Point to;
  double mass;
  double length;
  double drop;  // u_i - w_j
};

/// Non-trivial plan segments annotated with the potential drop along them.
std::vector<Ray> extract_rays(const TransportPlan& plan, const DualPotentials& duals);

/// Whether two segments share a point that is interior to at least one of them.
bool segments_cross_in_interior(const Ray& a, const Ray& b, int dim, double tol = 1e-12);

}  // namespace otd
