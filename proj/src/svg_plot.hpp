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

#include <string>
#include <vector>

namespace otd {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string file_stem;  // output file name without extension
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Static SVG 1.1 document: axes with tick labels, one polyline per series, legend.
/// Identical input gives identical bytes.
std::string render_svg(const Plot& plot);

/// Writes <dir>/<file_stem>.svg for each plot, with characters outside [A-Za-z0-9.-] in the
/// stem replaced by '_'; returns the written paths. No plots, no files.
std::vector<std::string> emit_plots(const std::vector<Plot>& plots, const std::string& dir);

}  // namespace otd
