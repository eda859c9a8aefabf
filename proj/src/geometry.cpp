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

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "error.hpp"

namespace otd {

Grid::Grid(int dim, std::span<const double> lo, std::span<const double> hi, std::span<const int> res)
    : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::kInvalidArgument,
          "grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  require(lo.size() >= static_cast<std::size_t>(dim) && hi.size() >= static_cast<std::size_t>(dim) &&
              res.size() >= static_cast<std::size_t>(dim),
          ErrorCode::kInvalidArgument, "grid bounds/resolution shorter than dimension");
  cell_volume_ = 1.0;
  cell_count_ = 1;
  for (int k = 0; k < dim; ++k) {
    require(std::isfinite(lo[k]) && std::isfinite(hi[k]) && hi[k] > lo[k], ErrorCode::kInvalidArgument,
            "grid box must satisfy hi > lo on every axis");
    require(res[k] >= 1, ErrorCode::kInvalidArgument, "grid resolution must be >= 1");
    lo_[k] = lo[k];
    hi_[k] = hi[k];
    res_[k] = res[k];
    cell_volume_ *= (hi[k] - lo[k]) / res[k];
    cell_count_ *= static_cast<std::size_t>(res[k]);
  }
}

Grid Grid::unit(int dim, int n) {
  const std::array<double, kMaxDim> lo{0.0, 0.0, 0.0};
  const std::array<double, kMaxDim> hi{1.0, 1.0, 1.0};
  const std::array<int, kMaxDim> res{n, n, n};
  return Grid(dim, lo, hi, res);
}

double Grid::domain_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim_; ++k) v *= hi_[k] - lo_[k];
  return v;
}

double Grid::diameter() const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) s += (hi_[k] - lo_[k]) * (hi_[k] - lo_[k]);
  return std::sqrt(s);
}

Grid Grid::refined(int factor) const {
  require(factor >= 1, ErrorCode::kInvalidArgument, "refinement factor must be >= 1");
  std::array<int, kMaxDim> res = res_;
  for (int k = 0; k < dim_; ++k) res[k] *= factor;
  return Grid(dim_, lo_, hi_, res);
}

CellIndex Grid::unravel(std::size_t cell) const {
  CellIndex idx{0, 0, 0};
  for (int k = dim_ - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(cell % static_cast<std::size_t>(res_[k]));
    cell /= static_cast<std::size_t>(res_[k]);
  }
  return idx;
}

std::size_t Grid::ravel(const CellIndex& idx) const {
  std::size_t cell = 0;
  for (int k = 0; k < dim_; ++k) cell = cell * static_cast<std::size_t>(res_[k]) + static_cast<std::size_t>(idx[k]);
  return cell;
}

Point Grid::cell_center(std::size_t cell) const {
  const CellIndex idx = unravel(cell);
  Point c{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) c[k] = lo_[k] + (hi_[k] - lo_[k]) * (idx[k] + 0.5) / res_[k];
  return c;
}

bool Grid::contains(const Point& x, double slack) const {
  for (int k = 0; k < dim_; ++k) {
    const double tol = slack * (hi_[k] - lo_[k]);
    if (!(x[k] >= lo_[k] - tol && x[k] <= hi_[k] + tol)) return false;
  }
  return true;
}

int Grid::locate_axis(int k, double coord) const {
  const double u = (coord - lo_[k]) / (hi_[k] - lo_[k]) * res_[k];
  const double i = std::ceil(u) - 1.0;
  if (!(i >= 0.0)) return 0;
  if (i >= res_[k] - 1) return res_[k] - 1;
  return static_cast<int>(i);
}

std::size_t Grid::locate(const Point& x) const {
  CellIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) idx[k] = locate_axis(k, x[k]);
  return ravel(idx);
}

bool Grid::operator==(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (int k = 0; k < dim_; ++k)
    if (lo_[k] != other.lo_[k] || hi_[k] != other.hi_[k] || res_[k] != other.res_[k]) return false;
  return true;
}

GriddedDensity::GriddedDensity(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  require(values.size() == grid.cell_count(), ErrorCode::kInvalidArgument,
          "density has " + std::to_string(values.size()) + " values for " + std::to_string(grid.cell_count()) +
              " cells");
  for (double x : values)
    require(std::isfinite(x) && x >= 0.0, ErrorCode::kInvalidArgument, "density values must be finite and >= 0");
}

GriddedDensity::GriddedDensity(Grid g) : grid(std::move(g)), values(grid.cell_count(), 0.0) {}

namespace {

bool close_points(const Point& a, const Point& b, int dim) {
  for (int k = 0; k < dim; ++k)
    if (std::fabs(a[k] - b[k]) > AtomicMeasure::kMergeTolerance) return false;
  return true;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

AtomicMeasure::AtomicMeasure(int dim, std::vector<Atom> atoms) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::kInvalidArgument, "atomic measure dimension must be 1, 2 or 3");
  for (const Atom& a : atoms) {
    require(std::isfinite(a.mass) && a.mass > 0.0, ErrorCode::kInvalidArgument, "atom masses must be positive");
    for (int k = 0; k < dim; ++k)
      require(std::isfinite(a.x[k]), ErrorCode::kInvalidArgument, "atom coordinates must be finite");
  }
  const std::size_t n = atoms.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a].x[0] < atoms[b].x[0]; });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  bool any_merge = false;
  for (std::size_t pos = 1; pos < n; ++pos) {
    const std::size_t i = order[pos];
    for (std::size_t back = pos; back-- > 0;) {
      const std::size_t j = order[back];
      if (atoms[j].x[0] < atoms[i].x[0] - kMergeTolerance) break;
      if (close_points(atoms[i].x, atoms[j].x, dim)) {
        const std::size_t ri = find_root(parent, i);
        const std::size_t rj = find_root(parent, j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
        any_merge = true;
      }
    }
  }
  if (!any_merge) {
    atoms_ = std::move(atoms);
    return;
  }
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find_root(parent, i);
    if (slot[r] == n) {
      slot[r] = atoms_.size();
      atoms_.push_back(Atom{atoms[r].x, 0.0});
    }
    atoms_[slot[r]].mass += atoms[i].mass;
  }
}

double total_mass(const GriddedDensity& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

double total_mass(const AtomicMeasure& m) {
  double s = 0.0;
  for (const Atom& a : m.atoms()) s += a.mass;
  return s;
}

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

AtomicMeasure discretize_density(const GriddedDensity& f) {
  require(total_mass(f) > 0.0, ErrorCode::kEmptyMeasure, "empty measure");
  const double vol = f.grid.cell_volume();
  std::vector<Atom> atoms;
  for (std::size_t c = 0; c < f.values.size(); ++c)
    if (f.values[c] > 0.0) atoms.push_back(Atom{f.grid.cell_center(c), f.values[c] * vol});
  return AtomicMeasure(f.grid.dim(), std::move(atoms));
}

namespace {

struct LatticeAxis {
  long kmin;
  long kmax;
};

std::array<LatticeAxis, kMaxDim> lattice_axes(int n, const Grid& domain) {
  require(n >= 1, ErrorCode::kInvalidArgument, "projection lattice parameter n must be >= 1");
  std::array<LatticeAxis, kMaxDim> axes{};
  for (int k = 0; k < domain.dim(); ++k) {
    axes[k].kmin = static_cast<long>(std::ceil(domain.lo(k) * n - 1e-9));
    axes[k].kmax = static_cast<long>(std::floor(domain.hi(k) * n + 1e-9));
    require(axes[k].kmin <= axes[k].kmax, ErrorCode::kInvalidArgument,
            "lattice (1/n)Z^d has no node inside the domain along axis " + std::to_string(k));
  }
  return axes;
}

std::array<long, kMaxDim> nearest_node(const Point& x, int n, int dim, const std::array<LatticeAxis, kMaxDim>& axes) {
  std::array<long, kMaxDim> key{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    // round half down: ties go to the smaller node
    const long node = static_cast<long>(std::ceil(x[k] * n - 0.5));
    key[k] = std::clamp(node, axes[k].kmin, axes[k].kmax);
  }
  return key;
}

Point node_point(const std::array<long, kMaxDim>& key, int n, const Grid& domain) {
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < domain.dim(); ++k)
    p[k] = std::clamp(static_cast<double>(key[k]) / n, domain.lo(k), domain.hi(k));
  return p;
}

}  // namespace

AtomicMeasure project_to_grid(const AtomicMeasure& nu, int n, const Grid& domain) {
  require(nu.dim() == domain.dim(), ErrorCode::kMismatch, "measure and domain dimensions differ");
  const auto axes = lattice_axes(n, domain);
  std::map<std::array<long, kMaxDim>, std::size_t> slot;
  std::vector<Atom> out;
  for (const Atom& a : nu.atoms()) {
    const auto key = nearest_node(a.x, n, nu.dim(), axes);
    auto [it, inserted] = slot.try_emplace(key, out.size());
    if (inserted) out.push_back(Atom{node_point(key, n, domain), 0.0});
    out[it->second].mass += a.mass;
  }
  return AtomicMeasure(nu.dim(), std::move(out));
}

double max_projection_displacement(const AtomicMeasure& nu, int n, const Grid& domain) {
  const auto axes = lattice_axes(n, domain);
  double worst = 0.0;
  for (const Atom& a : nu.atoms()) {
    const Point p = node_point(nearest_node(a.x, n, nu.dim(), axes), n, domain);
    worst = std::max(worst, distance(a.x, p, nu.dim()));
  }
  return worst;
}

GriddedDensity bin_atoms(const AtomicMeasure& m, const Grid& grid) {
  require(m.dim() == grid.dim(), ErrorCode::kMismatch, "measure and grid dimensions differ");
  GriddedDensity out(grid);
  const double inv_vol = 1.0 / grid.cell_volume();
  for (const Atom& a : m.atoms()) {
    require(grid.contains(a.x), ErrorCode::kOutOfDomain, "atom outside the grid domain");
    out.values[grid.locate(a.x)] += a.mass * inv_vol;
  }
  return out;
}

void deposit_box(GriddedDensity& out, const Point& lo, const Point& hi, double density) {
  const Grid& g = out.grid;
  const int dim = g.dim();
  std::array<std::vector<std::pair<int, double>>, kMaxDim> overlaps;
  for (int k = 0; k < kMaxDim; ++k) {
    if (k >= dim) {
      overlaps[k] = {{0, 1.0}};
      continue;
    }
    const int first = g.locate_axis(k, lo[k]);
    const int last = g.locate_axis(k, hi[k]);
    const double a = g.lo(k);
    const double ext = g.hi(k) - g.lo(k);
    const int n = g.res(k);
    for (int i = std::max(0, first - 1); i <= std::min(n - 1, last + 1); ++i) {
      const double c0 = a + ext * i / n;
      const double c1 = a + ext * (i + 1) / n;
      const double len = std::min(hi[k], c1) - std::max(lo[k], c0);
      if (len > 0.0) overlaps[k].emplace_back(i, len);
    }
  }
  const double scale = density / g.cell_volume();
  for (const auto& [i0, l0] : overlaps[0])
    for (const auto& [i1, l1] : overlaps[1])
      for (const auto& [i2, l2] : overlaps[2]) {
        const std::size_t cell = g.ravel(CellIndex{i0, i1, i2});
        out.values[cell] += scale * (l0 * l1 * l2);
      }
}

GriddedDensity bin_atoms_as_cells(const AtomicMeasure& m, const Grid& grid) {
  require(m.dim() == grid.dim(), ErrorCode::kMismatch, "measure and grid dimensions differ");
  GriddedDensity out(grid);
  const double inv_vol = 1.0 / grid.cell_volume();
  for (const Atom& a : m.atoms()) {
    require(grid.contains(a.x), ErrorCode::kOutOfDomain, "atom outside the grid domain");
    Point lo{0.0, 0.0, 0.0};
    Point hi{0.0, 0.0, 0.0};
    for (int k = 0; k < grid.dim(); ++k) {
      const double h = grid.spacing(k);
      const double c = std::clamp(a.x[k], grid.lo(k) + 0.5 * h, grid.hi(k) - 0.5 * h);
      lo[k] = c - 0.5 * h;
      hi[k] = c + 0.5 * h;
    }
    deposit_box(out, lo, hi, a.mass * inv_vol);
  }
  return out;
}

}  // namespace otd
