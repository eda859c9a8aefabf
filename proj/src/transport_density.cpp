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

#include "transport_density.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace otd {

namespace {

// Entries per rasterization work item. The decomposition is fixed so the
// accumulation order (and hence every bit of the result) is independent of
// the number of workers.
constexpr std::size_t kEntryBlock = 4096;

// Parameter gaps below this are folded into the neighbouring piece.
constexpr double kMinParamGap = 1e-13;

struct Deposit {
  std::size_t cell;
  double weight;
  Vec direction;
};

template <typename Sink>
void rasterize_blocks(const TransportPlan& plan, const Grid& grid, Sink&& sink) {
  require(plan.dim() == grid.dim(), ErrorCode::kMismatch, "plan and grid dimensions differ");
  const std::size_t count = plan.entries.size();
  const std::size_t blocks = (count + kEntryBlock - 1) / kEntryBlock;
  std::vector<std::vector<Deposit>> pieces(blocks);
  const double inv_vol = 1.0 / grid.cell_volume();
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(count, (b + 1) * kEntryBlock);
    for (std::size_t k = b * kEntryBlock; k < end; ++k) {
      const PlanEntry& e = plan.entries[k];
      const Point& x = plan.source[e.source].x;
      const Point& y = plan.target[e.target].x;
      const double len = plan.length(e);
      if (!(len > 0.0)) continue;
      Vec dir{0.0, 0.0, 0.0};
      for (int d = 0; d < grid.dim(); ++d) dir[d] = (y[d] - x[d]) / len;
      for (const SegmentPiece& p : traverse_segment(grid, x, y))
        pieces[b].push_back(Deposit{p.cell, e.mass * p.length * inv_vol, dir});
    }
  });
  for (const auto& block : pieces)
    for (const Deposit& d : block) sink(d);
}

}  // namespace

std::vector<SegmentPiece> traverse_segment(const Grid& grid, const Point& x, const Point& y) {
  require(grid.contains(x) && grid.contains(y), ErrorCode::kOutOfDomain, "segment endpoint outside the grid domain");
  const int dim = grid.dim();
  const double len = distance(x, y, dim);
  std::vector<SegmentPiece> out;
  if (!(len > 0.0)) return out;

  std::vector<double> ts{0.0, 1.0};
  for (int k = 0; k < dim; ++k) {
    const double dx = y[k] - x[k];
    if (dx == 0.0) continue;
    const double a = grid.lo(k);
    const double ext = grid.hi(k) - grid.lo(k);
    const int n = grid.res(k);
    const double ux = (x[k] - a) / ext * n;
    const double uy = (y[k] - a) / ext * n;
    const long first = static_cast<long>(std::floor(std::min(ux, uy))) + 1;
    const long last = static_cast<long>(std::ceil(std::max(ux, uy))) - 1;
    for (long m = std::max(first, 1L); m <= std::min(last, static_cast<long>(n) - 1); ++m) {
      const double plane = a + ext * static_cast<double>(m) / n;
      const double t = (plane - x[k]) / dx;
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());

  // merge near-coincident crossings (segment passing through an edge or corner)
  std::vector<double> cuts{0.0};
  for (std::size_t i = 1; i + 1 < ts.size(); ++i)
    if (ts[i] - cuts.back() > kMinParamGap) cuts.push_back(ts[i]);
  if (1.0 - cuts.back() <= kMinParamGap && cuts.size() > 1) cuts.back() = 1.0;
  else cuts.push_back(1.0);

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t0 = cuts[i];
    const double t1 = cuts[i + 1];
    const double tm = 0.5 * (t0 + t1);
    Point mid{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) mid[k] = x[k] + tm * (y[k] - x[k]);
    const std::size_t cell = grid.locate(mid);
    const double piece = (t1 - t0) * len;
    if (!out.empty() && out.back().cell == cell)
      out.back().length += piece;
    else
      out.push_back(SegmentPiece{cell, piece});
  }
  return out;
}

double CellVectorField::magnitude(std::size_t cell) const {
  double s = 0.0;
  for (int k = 0; k < grid.dim(); ++k) s += vectors[cell][k] * vectors[cell][k];
  return std::sqrt(s);
}

GriddedDensity rasterize_sigma(const TransportPlan& plan, const Grid& grid) {
  GriddedDensity sigma(grid);
  rasterize_blocks(plan, grid, [&](const Deposit& d) { sigma.values[d.cell] += d.weight; });
  return sigma;
}

CellVectorField rasterize_flow(const TransportPlan& plan, const Grid& grid) {
  CellVectorField field(grid);
  rasterize_blocks(plan, grid, [&](const Deposit& d) {
    for (int k = 0; k < grid.dim(); ++k) field.vectors[d.cell][k] += d.weight * d.direction[k];
  });
  return field;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const Term& t : terms_)
    if (t.coeff != 0.0) deg = std::max(deg, t.power[0] + t.power[1] + t.power[2]);
  return deg;
}

double Polynomial::value(const Point& p) const {
  double s = 0.0;
  for (const Term& t : terms_) {
    double m = t.coeff;
    for (int k = 0; k < kMaxDim; ++k) m *= std::pow(p[k], t.power[k]);
    s += m;
  }
  return s;
}

Vec Polynomial::gradient(const Point& p) const {
  Vec g{0.0, 0.0, 0.0};
  for (const Term& t : terms_) {
    for (int k = 0; k < kMaxDim; ++k) {
      if (t.power[k] == 0) continue;
      double m = t.coeff * t.power[k];
      for (int j = 0; j < kMaxDim; ++j) m *= std::pow(p[j], j == k ? t.power[j] - 1 : t.power[j]);
      g[k] += m;
    }
  }
  return g;
}

double divergence_residual(const TransportPlan& plan, const CellVectorField& field, const Polynomial& phi) {
  require(phi.degree() <= 2, ErrorCode::kUnsupported, "test polynomial degree must be <= 2");
  require(plan.dim() == field.grid.dim(), ErrorCode::kMismatch, "plan and field dimensions differ");
  const Grid& g = field.grid;
  double weak = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Vec grad = phi.gradient(g.cell_center(c));
    double dot = 0.0;
    for (int k = 0; k < g.dim(); ++k) dot += grad[k] * field.vectors[c][k];
    weak += dot;
  }
  weak *= g.cell_volume();
  double exact = 0.0;
  for (const PlanEntry& e : plan.entries)
    exact += e.mass * (phi.value(plan.target[e.target].x) - phi.value(plan.source[e.source].x));
  return std::fabs(weak - exact);
}

double l1_distance(const GriddedDensity& f, const GriddedDensity& g) {
  require(f.grid == g.grid, ErrorCode::kMismatch, "densities live on different grids");
  double s = 0.0;
  for (std::size_t c = 0; c < f.values.size(); ++c) s += std::fabs(f.values[c] - g.values[c]);
  return s * f.grid.cell_volume();
}

}  // namespace otd
