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
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace otd {

/// Analytic or file-backed density on the scenario box, normalized to unit mass.
struct DensitySpec {
  std::string type;          // "uniform_box", "power_spike", "file"
  std::vector<double> lo;    // uniform_box corners
  std::vector<double> hi;
  std::vector<double> center;  // power_spike center
  double beta = 0.0;           // power_spike exponent
  std::string file;
};

struct Tolerances {
  double binning = 0.15;
  double mc_sigmas = 3.0;
  double exact = 1e-9;
  double stability = 0.05;
};

/// One experiment configuration, read from a flat JSON document.
struct Scenario {
  std::string name = "scenario";
  int dim = 2;
  std::vector<double> domain_lo;
  std::vector<double> domain_hi;

  DensitySpec source;
  // "atoms" (inline target_atoms), "atoms_file" (target_file) or "density". In JSON a density
  // target is written with its own type: target_type = uniform_box | power_spike | file.
  std::string target_type = "atoms";
  std::vector<Atom> target_atoms;
  std::string target_file;
  DensitySpec target_density;

  std::vector<int> resolutions{64};
  std::vector<int> projection_n{4, 8, 16, 32};
  std::vector<double> eps{0.0};
  std::vector<double> p{1.5};
  std::vector<double> q{2.0};  // kQEqualsP stands for q = p
  static constexpr double kQEqualsP = -1.0;
  std::vector<double> t_samples{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int quad_nodes = 64;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  double c_fit = 1.0;
  Tolerances tol;
  std::string out_dir = "out";
  std::string base_dir;  // directory relative file paths are resolved against

  Grid grid(int res) const;
  /// Source density f+ at resolution res.
  GriddedDensity source_density(int res) const;
  /// Target density f- at resolution res; only for target_type "density".
  GriddedDensity target_as_density(int res) const;
  /// Target as atoms: the given atoms, or the discretized target density at res.
  AtomicMeasure target_measure(int res) const;
  bool target_is_atomic() const { return target_type != "density"; }
  /// The q exponent paired with p for a q-list entry.
  static double resolve_q(double p, double q) { return q == kQEqualsP ? p : q; }

  /// Checks ranges and file references; throws Error.
  void validate() const;
  /// Resolved configuration with every default filled in.
  std::string to_json() const;

  static Scenario from_json(const std::string& text, const std::string& base_dir = "");
  static Scenario load(const std::string& path);
};

/// Builds a unit-mass density from its description on the grid.
GriddedDensity make_density(const DensitySpec& spec, const Grid& grid, const std::string& base_dir);

}  // namespace otd
