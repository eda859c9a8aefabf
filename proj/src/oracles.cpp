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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace otd::oracle {

namespace {

constexpr std::uint64_t kMaxSamples = 10'000'000;
constexpr std::size_t kMaxAtoms = 8;

std::size_t cell_of(const Grid& g, const Point& p) {
  std::size_t cell = 0;
  for (int k = 0; k < g.dim(); ++k) {
    const double h = (g.hi(k) - g.lo(k)) / g.res(k);
    long i = static_cast<long>(std::floor((p[k] - g.lo(k)) / h));
    i = std::clamp(i, 0L, static_cast<long>(g.res(k)) - 1);
    cell = cell * static_cast<std::size_t>(g.res(k)) + static_cast<std::size_t>(i);
  }
  return cell;
}

double euclid(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

McSigma mc_sigma(const TransportPlan& plan, const Grid& grid, std::uint64_t samples, std::uint64_t seed) {
  require(samples >= 10'000, ErrorCode::kInvalidArgument, "mc_sigma needs at least 1e4 samples");
  require(samples <= kMaxSamples, ErrorCode::kSizeCap, "oracle size cap: at most 1e7 samples");
  require(plan.dim() == grid.dim(), ErrorCode::kMismatch, "plan and grid dimensions differ");
  const int dim = grid.dim();
  const std::size_t cells = grid.cell_count();
  McSigma out{GriddedDensity(grid), GriddedDensity(grid), 0.0};

  std::vector<double> cumulative;
  double total = 0.0;
  bool any_motion = false;
  for (const PlanEntry& e : plan.entries) {
    total += e.mass;
    cumulative.push_back(total);
    any_motion = any_motion || euclid(plan.source[e.source].x, plan.target[e.target].x, dim) > 0.0;
  }
  if (!any_motion) return out;

  const double vol = (grid.hi(0) - grid.lo(0)) / grid.res(0) * (dim > 1 ? (grid.hi(1) - grid.lo(1)) / grid.res(1) : 1.0) *
                     (dim > 2 ? (grid.hi(2) - grid.lo(2)) / grid.res(2) : 1.0);
  std::vector<double> sum(cells, 0.0);
  std::vector<double> sum_sq(cells, 0.0);
  std::mt19937_64 rng(seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double pick = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const PlanEntry& e = plan.entries[static_cast<std::size_t>(it - cumulative.begin())];
    const double t = uniform01(rng);
    const Point& x = plan.source[e.source].x;
    const Point& y = plan.target[e.target].x;
    const double len = euclid(x, y, dim);
    if (len == 0.0) continue;
    Point p{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) p[k] = (1.0 - t) * x[k] + t * y[k];
    const double weight = total * len / vol;
    const std::size_t c = cell_of(grid, p);
    sum[c] += weight;
    sum_sq[c] += weight * weight;
  }
  const auto n = static_cast<double>(samples);
  for (std::size_t c = 0; c < cells; ++c) {
    const double mean = sum[c] / n;
    const double var = std::max(0.0, sum_sq[c] / n - mean * mean);
    out.sigma.values[c] = mean;
    out.std_error.values[c] = std::sqrt(var / (n - 1.0));
    out.l1_std_error += out.std_error.values[c] * vol;
  }
  return out;
}

BruteTransport brute_transport(const AtomicMeasure& mu, const AtomicMeasure& nu, double eps) {
  const std::size_t n = mu.size();
  require(n <= kMaxAtoms && nu.size() <= kMaxAtoms, ErrorCode::kSizeCap, "oracle size cap: at most 8 atoms");
  require(n > 0 && nu.size() == n, ErrorCode::kInvalidArgument, "brute transport needs equal, nonzero atom counts");
  require(mu.dim() == nu.dim(), ErrorCode::kMismatch, "source and target dimensions differ");
  const double mass = mu[0].mass;
  for (std::size_t i = 0; i < n; ++i)
    require(std::fabs(mu[i].mass - mass) <= 1e-12 * mass && std::fabs(nu[i].mass - mass) <= 1e-12 * mass,
            ErrorCode::kInvalidArgument, "brute transport needs equal atom masses");

  const double exponent = 1.0 + eps;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  BruteTransport best{std::numeric_limits<double>::infinity(), perm, TransportPlan{mu, nu, {}, exponent}};
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = euclid(mu[i].x, nu[perm[i]].x, mu.dim());
      c += mass * (d == 0.0 ? 0.0 : std::pow(d, exponent));
    }
    if (c < best.cost) {
      best.cost = c;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t i = 0; i < n; ++i) best.plan.entries.push_back(PlanEntry{i, best.permutation[i], mass});
  return best;
}

StepProfile sampled_rearrangement(const GriddedDensity& f, std::uint64_t samples, std::uint64_t seed) {
  require(samples >= 100'000, ErrorCode::kInvalidArgument, "sampled rearrangement needs at least 1e5 samples");
  require(samples <= kMaxSamples, ErrorCode::kSizeCap, "oracle size cap: at most 1e7 samples");
  const Grid& g = f.grid;
  double volume = 1.0;
  for (int k = 0; k < g.dim(); ++k) volume *= g.hi(k) - g.lo(k);

  std::mt19937_64 rng(seed);
  std::vector<double> draws(samples);
  for (auto& v : draws) {
    Point p{0.0, 0.0, 0.0};
    for (int k = 0; k < g.dim(); ++k) p[k] = g.lo(k) + uniform01(rng) * (g.hi(k) - g.lo(k));
    v = std::fabs(f.values[cell_of(g, p)]);
  }
  std::sort(draws.begin(), draws.end(), std::greater<>());

  StepProfile star;
  star.continuity = StepProfile::Continuity::kRight;
  star.levels.clear();
  const double unit = volume / static_cast<double>(samples);
  for (std::size_t i = 0; i < draws.size() && draws[i] > 0.0;) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    star.levels.push_back(draws[i]);
    star.breakpoints.push_back(static_cast<double>(j) * unit);
    i = j;
  }
  star.levels.push_back(0.0);
  return star;
}

double dkw_radius(std::uint64_t samples, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
}

}  // namespace otd::oracle
