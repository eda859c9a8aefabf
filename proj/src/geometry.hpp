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
#include <span>
#include <vector>

namespace otd {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using CellIndex = std::array<int, kMaxDim>;

/// Axis-aligned box [lo_1,hi_1] x ... x [lo_d,hi_d] cut into res_1 x ... x res_d cells.
/// Cells are numbered in row-major order: the last axis varies fastest.
class Grid {
 public:
  Grid(int dim, std::span<const double> lo, std::span<const double> hi, std::span<const int> res);

  /// [0,1]^dim with n cells per axis.
  static Grid unit(int dim, int n);

  int dim() const { return dim_; }
  double lo(int k) const { return lo_[k]; }
  double hi(int k) const { return hi_[k]; }
  int res(int k) const { return res_[k]; }
  double spacing(int k) const { return (hi_[k] - lo_[k]) / res_[k]; }
  double cell_volume() const { return cell_volume_; }
  double domain_volume() const;
  double diameter() const;
  std::size_t cell_count() const { return cell_count_; }

  /// Same box, `factor` times more cells along every axis.
  Grid refined(int factor) const;

  CellIndex unravel(std::size_t cell) const;
  std::size_t ravel(const CellIndex& idx) const;
  Point cell_center(std::size_t cell) const;

  /// Inside the closed box, allowing `slack` relative to the box extent.
  bool contains(const Point& x, double slack = 1e-12) const;

  /// Cell holding x. A point on an interior cell face goes to the lower-index
  /// neighbour; points on the outer boundary go to the adjacent cell.
  std::size_t locate(const Point& x) const;

  /// Per-axis cell index with the same face rule as locate().
  int locate_axis(int k, double coord) const;

  bool operator==(const Grid& other) const;

 private:
  int dim_;
  std::array<double, kMaxDim> lo_{};
  std::array<double, kMaxDim> hi_{};
  std::array<int, kMaxDim> res_{1, 1, 1};
  double cell_volume_ = 0.0;
  std::size_t cell_count_ = 0;
};

/// Nonnegative piecewise-constant density, one value per cell (mass per volume).
struct GriddedDensity {
  Grid grid;
  std::vector<double> values;

  GriddedDensity(Grid g, std::vector<double> v);
  /// All-zero density on g.
  explicit GriddedDensity(Grid g);
};

struct Atom {
  Point x{};
  double mass = 0.0;
};

/// Finite weighted point set. Points closer than kMergeTolerance on every axis
/// are merged (masses summed) keeping the position and order of the first occurrence.
class AtomicMeasure {
 public:
  static constexpr double kMergeTolerance = 1e-12;

  explicit AtomicMeasure(int dim) : dim_(dim) {}
  AtomicMeasure(int dim, std::vector<Atom> atoms);

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  int dim_;
  std::vector<Atom> atoms_;
};

double total_mass(const GriddedDensity& f);
double total_mass(const AtomicMeasure& m);

double distance(const Point& a, const Point& b, int dim);

/// One atom per positive cell, located at the cell center.
AtomicMeasure discretize_density(const GriddedDensity& f);

/// Pushforward of nu under the nearest-node map onto (1/n)Z^d intersected with the box.
/// Ties go to the lexicographically smallest node.
AtomicMeasure project_to_grid(const AtomicMeasure& nu, int n, const Grid& domain);

/// Largest |x - P_n(x)| over the atoms of nu.
double max_projection_displacement(const AtomicMeasure& nu, int n, const Grid& domain);

/// Point deposit: every atom's mass goes to the cell returned by Grid::locate.
GriddedDensity bin_atoms(const AtomicMeasure& m, const Grid& grid);

/// Box deposit: every atom is spread uniformly over a cell-sized box centered at
/// the atom (shifted to stay inside the domain) and remapped by exact overlap.
GriddedDensity bin_atoms_as_cells(const AtomicMeasure& m, const Grid& grid);

/// Adds `density` over the axis-aligned box [lo,hi] into `out`, weighting each cell
/// by its exact overlap volume. The box must lie inside the grid's domain.
void deposit_box(GriddedDensity& out, const Point& lo, const Point& hi, double density);

}  // namespace otd
