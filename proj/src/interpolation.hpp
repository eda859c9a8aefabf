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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "lorentz.hpp"
#include "ot_solver.hpp"

namespace otd {

/// Displacement interpolation: one atom per plan entry at (1-t)x + ty.
AtomicMeasure interpolate_plan(const TransportPlan& plan, double t);

/// For every target atom, the source atoms feeding it and the mass each sends.
struct AssignmentRegions {
  TransportPlan plan;
  std::vector<std::vector<std::pair<std::size_t, double>>> regions;

  static AssignmentRegions from_plan(TransportPlan plan);
};

/// Density of the interpolant when the plan's source is discretize_density(f_plus):
/// the part of each source cell sent to x_i is mapped onto the shrunken cell
/// (1-t) cell + t x_i with density scaled by (1-t)^{-d}, then remapped onto
/// `out` (default: the grid of f_plus) by exact overlap.
GriddedDensity interpolant_density(const GriddedDensity& f_plus, const AssignmentRegions& regions, double t,
                                   const std::optional<Grid>& out = std::nullopt);

struct SigmaBound {
  GriddedDensity lhs;  // rasterized sigma
  GriddedDensity rhs;  // diam * (1/K) sum_k binned mu_{t_k}
  double max_defect;   // max over cells of lhs - rhs
};

/// Compares sigma against diam(Omega) * int_0^1 mu_t dt using the midpoint rule
/// with quad_nodes nodes; mu_t is binned by point deposit.
SigmaBound sigma_interpolation_bound(const TransportPlan& plan, const Grid& grid, int quad_nodes);

/// min{(1-t)^{-d/p'} a, t^{-d/p'} b}
double two_sided_envelope(double t, int dim, const LorentzParams& params, double norm_plus, double norm_minus);

struct NormCurvePoint {
  double t;
  double norm;
  double envelope;
};

struct NormCurve {
  double norm_plus;
  double norm_minus;
  std::vector<NormCurvePoint> points;
};

/// Lorentz quasinorm of the interpolant at each t, with the two-sided envelope.
/// The plan must be the strictly convex (eps > 0) optimum between the discretized
/// f_plus and f_minus; each interpolated atom is spread over a cell-sized box.
NormCurve interpolant_norm_curve(const GriddedDensity& f_plus, const GriddedDensity& f_minus,
                                 const TransportPlan& plan, const LorentzParams& params,
                                 std::span<const double> t_samples);

/// Solves the eps-problem first. eps = 0 is rejected.
NormCurve interpolant_norm_curve(const GriddedDensity& f_plus, const GriddedDensity& f_minus, double eps,
                                 const LorentzParams& params, std::span<const double> t_samples);

}  // namespace otd
