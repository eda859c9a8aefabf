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

#include <array>
#include <cstddef>
#include <vector>

#include "geometry.hpp"
#include "ot_solver.hpp"

namespace otd {

struct SegmentPiece {
  std::size_t cell;
  double length;
};

/// Cells crossed by [x,y] in order from x, with the exact length of each
/// intersection. A segment lying on a cell face is charged to the lower-index cell.
std::vector<SegmentPiece> traverse_segment(const Grid& grid, const Point& x, const Point& y);

using Vec = std::array<double, kMaxDim>;

/// One d-vector per cell (mass * length / volume).
struct CellVectorField {
  Grid grid;
  std::vector<Vec> vectors;

  explicit CellVectorField(Grid g) : grid(std::move(g)), vectors(grid.cell_count(), Vec{0.0, 0.0, 0.0}) {}
  double magnitude(std::size_t cell) const;
};

/// Transport density of the plan as a cell density:
/// sigma_c = sum_ij gamma_ij |[x_i,y_j] cap c| / |c|.
GriddedDensity rasterize_sigma(const TransportPlan& plan, const Grid& grid);

/// Flow field v_c = sum_ij gamma_ij unit(y_j - x_i) |[x_i,y_j] cap c| / |c|.
CellVectorField rasterize_flow(const TransportPlan& plan, const Grid& grid);

/// Polynomial in up to three variables, sum of coeff * x^a y^b z^c.
class Polynomial {
 public:
  struct Term {
    double coeff;
    std::array<int, kMaxDim> power;
  };

  Polynomial() = default;
  explicit Polynomial(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static Polynomial constant(double c) { return Polynomial(std::vector<Term>{Term{c, {0, 0, 0}}}); }
  static Polynomial monomial(double c, std::array<int, kMaxDim> power) { return Polynomial(std::vector<Term>{Term{c, power}}); }

  int degree() const;
  double value(const Point& p) const;
  Vec gradient(const Point& p) const;

 private:
  std::vector<Term> terms_;
};

/// |sum_c grad(phi)(center_c) . v_c |c| - sum_ij gamma_ij (phi(y_j) - phi(x_i))|.
/// Exact (to rounding) for affine phi; phi of degree above 2 is rejected.
double divergence_residual(const TransportPlan& plan, const CellVectorField& field, const Polynomial& phi);

/// sum_c |f_c - g_c| |c|
double l1_distance(const GriddedDensity& f, const GriddedDensity& g);

}  // namespace otd
