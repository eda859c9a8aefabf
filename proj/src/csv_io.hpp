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
#include <iosfwd>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace otd {

/// Shortest decimal text that round-trips the double.
std::string format_double(double x);

// Gridded data: a `# grid d=<d> res=<n1,...> box=<a1,b1;...>` header, then one
// cell per line in row-major order.
std::string grid_header(const Grid& grid);
Grid parse_grid_header(const std::string& line);

void write_density_csv(std::ostream& os, const GriddedDensity& f);
GriddedDensity read_density_csv(std::istream& is);
void write_density_csv(const std::string& path, const GriddedDensity& f);
GriddedDensity read_density_csv(const std::string& path);

/// d columns per line.
void write_vector_field_csv(std::ostream& os, const Grid& grid, const std::vector<std::array<double, kMaxDim>>& v);

// Atoms: `x1,...,xd,mass` per line; a leading non-numeric header line is skipped.
void write_atoms_csv(std::ostream& os, const AtomicMeasure& m);
AtomicMeasure read_atoms_csv(std::istream& is, int dim);
void write_atoms_csv(const std::string& path, const AtomicMeasure& m);
AtomicMeasure read_atoms_csv(const std::string& path, int dim);

/// Writes text to path, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace otd
