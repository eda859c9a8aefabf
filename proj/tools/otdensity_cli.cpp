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

// Command-line front end. Talks to the library only through the C interface.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otdensity/otdensity.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

int report_error(otd_status status, const char* what) {
  std::fprintf(stderr, "otdensity: %s: %s (%s)\n", what, otd_last_error(), otd_status_string(status));
  return kExitError;
}

void print_rows(const otd_report* report) {
  const size_t n = otd_report_row_count(report);
  for (size_t i = 0; i < n; ++i) {
    otd_result_row row;
    if (otd_report_row(report, i, &row) != OTD_OK) continue;
    std::printf("%-4s %-28s %-44s measured=%.10g bound=%.10g ratio=%.6g\n", row.pass ? "PASS" : "FAIL",
                row.experiment, row.parameters, row.measured, row.bound, row.ratio);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"otdensity: exact transport densities, Lorentz norms and the bound experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  std::string out_dir;
  std::int64_t seed = -1;
  int threads = 1;
  bool timing = false;
  bool no_files = false;
  bool print_config = false;
  app.add_option("--config", config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides out_dir in the config)");
  app.add_option("--seed", seed, "Random seed (overrides seed in the config)")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "Record wall-clock seconds in the runtime column");
  app.add_flag("--no-files", no_files, "Print results only, write nothing");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"solve", "Exact plan and potentials with the duality certificate"},
      {"sigma", "Transport density and flow field with their identities"},
      {"lorentz", "Lorentz and maximal quasinorms of the source density"},
      {"interp", "Displacement interpolation and the sigma bound"},
      {"prop21", "Semi-discrete Lorentz bound on sigma"},
      {"prop23", "Grid projection sweep: Cauchy differences and bounded norms"},
      {"prop25", "Two-sided interpolant envelope and eps-stability of sigma"},
      {"oracle", "Monte Carlo and sampling cross-checks"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  otd_status st = otd_set_threads(threads);
  if (st != OTD_OK) return report_error(st, "threads");

  otd_scenario* scenario = nullptr;
  st = otd_scenario_load(config.c_str(), &scenario);
  if (st != OTD_OK) return report_error(st, "config");
  if (!out_dir.empty()) otd_scenario_set_out_dir(scenario, out_dir.c_str());
  if (seed >= 0) otd_scenario_set_seed(scenario, static_cast<std::uint64_t>(seed));
  if (print_config) {
    std::fputs(otd_scenario_json(scenario), stdout);
    otd_scenario_destroy(scenario);
    return 0;
  }

  int flags = 0;
  if (timing) flags |= OTD_RUN_TIMING;
  if (no_files) flags |= OTD_RUN_NO_FILES;
  otd_report* report = nullptr;
  st = otd_run(scenario, command.c_str(), flags, &report);
  otd_scenario_destroy(scenario);
  if (st != OTD_OK) return report_error(st, command.c_str());

  print_rows(report);
  const size_t failures = otd_report_failures(report);
  std::printf("%s: %zu rows, %zu failed\n", command.c_str(), otd_report_row_count(report), failures);
  for (size_t i = 0; i < otd_report_file_count(report); ++i) std::printf("wrote %s\n", otd_report_file(report, i));
  otd_report_destroy(report);
  return failures == 0 ? 0 : kExitFail;
}
