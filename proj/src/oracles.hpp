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

#include <cstdint>
#include <random>
#include <vector>

#include "geometry.hpp"
#include "lorentz.hpp"
#include "ot_solver.hpp"

// Brute-force references for the exact modules. Nothing here calls into the
// rasterizer, the simplex solver or the Lorentz closed forms.
namespace otd::oracle {

/// Uniform double in [0,1) from the top 53 bits of a 64-bit Mersenne Twister draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct McSigma {
  GriddedDensity sigma;
  GriddedDensity std_error;  // per-cell standard error of sigma
  double l1_std_error;       // sum_c std_error_c |c|
};

/// Monte Carlo transport density: draws (entry ~ gamma / gamma(Omega), t ~ U[0,1))
/// and deposits gamma(Omega) |x - y| / (samples |c|) at (1-t)x + ty.
McSigma mc_sigma(const TransportPlan& plan, const Grid& grid, std::uint64_t samples, std::uint64_t seed);

struct BruteTransport {
  double cost;
  std::vector<std::size_t> permutation;  // source i -> target permutation[i]
  TransportPlan plan;
};

/// Assignment by enumeration of all n! permutations; n <= 8, equal masses.
BruteTransport brute_transport(const AtomicMeasure& mu, const AtomicMeasure& nu, double eps);

/// Empirical quantile function of |f| under uniform sampling of the box, in
/// measure units.
StepProfile sampled_rearrangement(const GriddedDensity& f, std::uint64_t samples, std::uint64_t seed);

/// Dvoretzky-Kiefer-Wolfowitz radius sqrt(log(2/alpha) / (2n)).
double dkw_radius(std::uint64_t samples, double alpha);

}  // namespace otd::oracle
