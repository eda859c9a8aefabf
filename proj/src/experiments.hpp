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

#include "scenario.hpp"
#include "svg_plot.hpp"

namespace otd {

/// One line of the results table. ratio = measured / bound; pass iff ratio <= 1 + tolerance
/// (rows marked strict need ratio < 1). runtime is NaN unless timing was requested.
struct ResultRow {
  std::string scenario;
  std::string experiment;
  std::string parameters;
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double runtime = 0.0;
};

struct Report {
  std::vector<ResultRow> rows;
  std::vector<Plot> plots;
  std::vector<std::string> files;  // everything written, in order

  bool all_pass() const;
  std::size_t failures() const;
};

struct RunOptions {
  bool timing = false;       // fill the runtime column with wall-clock seconds
  bool write_files = true;   // CSV tables, SVG plots and the resolved config under out_dir/<command>
};

/// The commands: solve, sigma, lorentz, interp, prop21, prop23, prop25, oracle.
const std::vector<std::string>& experiment_names();

Report run_experiment(const Scenario& scenario, const std::string& command, const RunOptions& options = {});

Report run_solve(const Scenario& s, const RunOptions& o = {});
Report run_sigma(const Scenario& s, const RunOptions& o = {});
Report run_lorentz(const Scenario& s, const RunOptions& o = {});
Report run_interp(const Scenario& s, const RunOptions& o = {});
Report run_prop21(const Scenario& s, const RunOptions& o = {});
Report run_prop23(const Scenario& s, const RunOptions& o = {});
Report run_prop25(const Scenario& s, const RunOptions& o = {});
Report run_oracle(const Scenario& s, const RunOptions& o = {});

/// int_0^1 (1-t)^{-d/p'} dt = 1 / (1 - d/p'); +inf when p >= d/(d-1).
double prop21_factor(int dim, double p);

/// Header `scenario,experiment,parameters,measured,bound,ratio,pass,runtime` and one line per row.
std::string rows_csv(const std::vector<ResultRow>& rows);

}  // namespace otd
