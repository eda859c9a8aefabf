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

#include "interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"
#include "transport_density.hpp"

namespace otd {

namespace {

bool same_box(const Grid& a, const Grid& b) {
  if (a.dim() != b.dim()) return false;
  for (int k = 0; k < a.dim(); ++k)
    if (a.lo(k) != b.lo(k) || a.hi(k) != b.hi(k)) return false;
  return true;
}

}  // namespace

AtomicMeasure interpolate_plan(const TransportPlan& plan, double t) {
  require(t >= 0.0 && t <= 1.0, ErrorCode::kInvalidArgument, "interpolation time must lie in [0, 1]");
  std::vector<Atom> atoms;
  atoms.reserve(plan.entries.size());
  for (const PlanEntry& e : plan.entries) {
    const Point& x = plan.source[e.source].x;
    const Point& y = plan.target[e.target].x;
    Atom a;
    for (int k = 0; k < plan.dim(); ++k) a.x[k] = (1.0 - t) * x[k] + t * y[k];
    a.mass = e.mass;
    atoms.push_back(a);
  }
  return AtomicMeasure(plan.dim(), std::move(atoms));
}

AssignmentRegions AssignmentRegions::from_plan(TransportPlan plan) {
  AssignmentRegions r{std::move(plan), {}};
  r.regions.resize(r.plan.target.size());
  for (const PlanEntry& e : r.plan.entries) r.regions[e.target].emplace_back(e.source, e.mass);
  return r;
}

GriddedDensity interpolant_density(const GriddedDensity& f_plus, const AssignmentRegions& regions, double t,
                                   const std::optional<Grid>& out) {
  require(t >= 0.0 && t < 1.0, ErrorCode::kInvalidArgument,
          "interpolant density needs t in [0, 1); use interpolate_plan at t = 1");
  const Grid& src = f_plus.grid;
  const Grid dst = out.value_or(src);
  require(same_box(src, dst), ErrorCode::kMismatch, "output grid must cover the same box as f_plus");
  const TransportPlan& plan = regions.plan;
  require(plan.dim() == src.dim(), ErrorCode::kMismatch, "plan and density dimensions differ");

  // source atom i <-> i-th positive cell of f_plus
  std::vector<std::size_t> cell_of;
  for (std::size_t c = 0; c < f_plus.values.size(); ++c)
    if (f_plus.values[c] > 0.0) cell_of.push_back(c);
  require(cell_of.size() == plan.source.size(), ErrorCode::kMismatch,
          "plan source is not the discretization of f_plus");
  for (std::size_t i = 0; i < cell_of.size(); ++i)
    require(distance(plan.source[i].x, src.cell_center(cell_of[i]), src.dim()) <= 1e-12 * src.diameter(),
            ErrorCode::kMismatch, "plan source is not the discretization of f_plus");

  const int dim = src.dim();
  const double shrink = 1.0 - t;
  const double image_volume = std::pow(shrink, dim) * src.cell_volume();
  GriddedDensity result(dst);
  for (std::size_t j = 0; j < regions.regions.size(); ++j) {
    const Point& y = plan.target[j].x;
    for (const auto& [i, mass] : regions.regions[j]) {
      const CellIndex idx = src.unravel(cell_of[i]);
      Point lo{0.0, 0.0, 0.0};
      Point hi{0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k) {
        const double ext = src.hi(k) - src.lo(k);
        const double c0 = src.lo(k) + ext * idx[k] / src.res(k);
        const double c1 = src.lo(k) + ext * (idx[k] + 1) / src.res(k);
        lo[k] = shrink * c0 + t * y[k];
        hi[k] = shrink * c1 + t * y[k];
      }
      deposit_box(result, lo, hi, mass / image_volume);
    }
  }
  return result;
}

SigmaBound sigma_interpolation_bound(const TransportPlan& plan, const Grid& grid, int quad_nodes) {
  require(quad_nodes >= 8, ErrorCode::kInvalidArgument, "sigma bound needs at least 8 quadrature nodes");
  SigmaBound out{rasterize_sigma(plan, grid), GriddedDensity(grid), 0.0};
  const double weight = grid.diameter() / quad_nodes;
  for (int k = 0; k < quad_nodes; ++k) {
    const double t = (k + 0.5) / quad_nodes;
    const GriddedDensity binned = bin_atoms(interpolate_plan(plan, t), grid);
    for (std::size_t c = 0; c < binned.values.size(); ++c) out.rhs.values[c] += weight * binned.values[c];
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < grid.cell_count(); ++c) worst = std::max(worst, out.lhs.values[c] - out.rhs.values[c]);
  out.max_defect = worst;
  return out;
}

double two_sided_envelope(double t, int dim, const LorentzParams& params, double norm_plus, double norm_minus) {
  const double a = params.dilation_exponent(dim);
  const double from_plus = t < 1.0 ? std::pow(1.0 - t, -a) * norm_plus : std::numeric_limits<double>::infinity();
  const double from_minus = t > 0.0 ? std::pow(t, -a) * norm_minus : std::numeric_limits<double>::infinity();
  return std::min(from_plus, from_minus);
}

NormCurve interpolant_norm_curve(const GriddedDensity& f_plus, const GriddedDensity& f_minus,
                                 const TransportPlan& plan, const LorentzParams& params,
                                 std::span<const double> t_samples) {
  require(plan.cost_exponent > 1.0, ErrorCode::kUnsupported, "two-sided bound requires strictly convex cost");
  require(f_plus.grid == f_minus.grid, ErrorCode::kMismatch, "f_plus and f_minus must share a grid");
  const int dim = f_plus.grid.dim();
  NormCurve curve{lorentz_quasinorm(f_plus, params), lorentz_quasinorm(f_minus, params), {}};
  curve.points.resize(t_samples.size());
  parallel_for(t_samples.size(), [&](std::size_t k) {
    const double t = t_samples[k];
    const GriddedDensity ft = bin_atoms_as_cells(interpolate_plan(plan, t), f_plus.grid);
    curve.points[k] = NormCurvePoint{t, lorentz_quasinorm(ft, params),
                                     two_sided_envelope(t, dim, params, curve.norm_plus, curve.norm_minus)};
  });
  return curve;
}

NormCurve interpolant_norm_curve(const GriddedDensity& f_plus, const GriddedDensity& f_minus, double eps,
                                 const LorentzParams& params, std::span<const double> t_samples) {
  require(eps > 0.0, ErrorCode::kUnsupported, "two-sided bound requires strictly convex cost");
  const KpSolution sol = solve_kp(discretize_density(f_plus), discretize_density(f_minus), eps);
  return interpolant_norm_curve(f_plus, f_minus, sol.plan, params, t_samples);
}

}  // namespace otd
