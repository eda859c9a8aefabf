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

// Acceptance driver: one PASS/FAIL line per criterion, exit status = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "interpolation.hpp"
#include "lorentz.hpp"
#include "oracles.hpp"
#include "ot_solver.hpp"
#include "scenario.hpp"
#include "test_support.hpp"
#include "transport_density.hpp"

using namespace otd;
using namespace otd::oracle;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

struct Instance {
  AtomicMeasure mu, nu;
  double eps;
};

std::vector<Instance> random_instances() {
  std::mt19937_64 rng(20240601);
  std::vector<Instance> out;
  for (int k = 0; k < 50; ++k) {
    const int dim = 1 + k % 2;
    const double eps = (k / 2) % 2 == 0 ? 0.0 : 0.1;
    const auto n = static_cast<std::size_t>(2 + rng() % 99);
    const auto m = static_cast<std::size_t>(2 + rng() % 99);
    AtomicMeasure mu = testing::random_atoms(rng, dim, n);
    AtomicMeasure nu = testing::normalized(testing::random_atoms(rng, dim, m), total_mass(mu));
    out.push_back({std::move(mu), std::move(nu), eps});
  }
  return out;
}

Outcome duality() {
  const auto start = Clock::now();
  double worst_gap = 0.0, worst_brute = 0.0;
  for (const Instance& in : random_instances()) {
    const KpSolution s = solve_kp(in.mu, in.nu, in.eps);
    worst_gap = std::max(worst_gap, std::fabs(duality_gap(s.plan, s.duals)) / std::max(1.0, std::fabs(s.cost)));
  }
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 1 + trial % 2;
    const double eps = (trial / 2) % 2 == 0 ? 0.0 : 0.1;
    const auto n = static_cast<std::size_t>(1 + trial % 6);
    const AtomicMeasure mu = testing::random_atoms(rng, dim, n, true);
    const AtomicMeasure nu = testing::random_atoms(rng, dim, n, true);
    const double exact = solve_kp(mu, nu, eps).cost;
    worst_brute = std::max(worst_brute, testing::rel(exact, brute_transport(mu, nu, eps).cost));
  }
  const double elapsed = seconds_since(start);
  return {worst_gap <= 1e-9 && worst_brute <= 1e-9 && elapsed < 60.0,
          fmt("max relative gap %.3g, max brute-force difference %.3g, %.2f s", worst_gap, worst_brute, elapsed)};
}

Outcome rasterizer() {
  double worst_mass = 0.0;
  for (const Instance& in : random_instances()) {
    const KpSolution s = solve_kp(in.mu, in.nu, in.eps);
    const GriddedDensity sigma = rasterize_sigma(s.plan, Grid::unit(in.mu.dim(), in.mu.dim() == 1 ? 97 : 41));
    double mass = 0.0;
    for (double v : sigma.values) mass += v * sigma.grid.cell_volume();
    worst_mass = std::max(worst_mass, std::fabs(mass - s.plan.cost(1.0)) / std::max(1e-300, s.plan.cost(1.0)));
  }

  std::mt19937_64 rng(4242);
  double worst_partition = 0.0;
  const double lo[] = {-1.0, 0.0, 0.5}, hi[] = {1.0, 2.0, 1.0};
  const int res[] = {11, 7, 5};
  for (int s = 0; s < 10000; ++s) {
    const int d = 1 + s % 3;
    const Grid g(d, std::span(lo, d), std::span(hi, d), std::span(res, d));
    Point x{}, y{};
    for (int k = 0; k < d; ++k) {
      x[k] = testing::uniform(rng, lo[k], hi[k]);
      y[k] = testing::uniform(rng, lo[k], hi[k]);
    }
    double total = 0.0;
    for (const SegmentPiece& p : traverse_segment(g, x, y)) total += p.length;
    worst_partition = std::max(worst_partition, std::fabs(total - distance(x, y, d)));
  }

  const Grid line = Grid::unit(1, 64);
  const AtomicMeasure mu = discretize_density(GriddedDensity(line, std::vector<double>(64, 1.0)));
  const TransportPlan plan = solve_kp(mu, AtomicMeasure(1, {{{1.0, 0, 0}, 1.0}}), 0.0).plan;
  const GriddedDensity sigma = rasterize_sigma(plan, line);
  double worst_profile = 0.0;
  for (std::size_t c = 0; c < 64; ++c)
    worst_profile = std::max(worst_profile, std::fabs(sigma.values[c] - line.cell_center(c)[0]));

  return {worst_mass <= 1e-9 && worst_partition <= 1e-12 && worst_profile <= 1e-3,
          fmt("mass identity %.3g, partition %.3g, sigma(z)=z deviation %.3g", worst_mass, worst_partition,
              worst_profile)};
}

Outcome monte_carlo() {
  const Grid g = Grid::unit(2, 16);
  GriddedDensity f(g);
  deposit_box(f, {0.125, 0.125, 0}, {0.5, 0.75, 0}, 1.0);
  const AtomicMeasure mu = discretize_density(f);
  const double m = total_mass(mu);
  const AtomicMeasure nu(2, {{{0.8, 0.3, 0}, 0.5 * m}, {{0.7, 0.9, 0}, 0.3 * m}, {{0.95, 0.6, 0}, 0.2 * m}});
  const TransportPlan plan = solve_kp(mu, nu, 0.0).plan;
  const McSigma mc = mc_sigma(plan, g, 10'000'000, 2024);
  const double l1 = l1_distance(mc.sigma, rasterize_sigma(plan, g));
  return {l1 <= 3.0 * mc.l1_std_error, fmt("L1 %.4g vs 3 SE %.4g", l1, 3.0 * mc.l1_std_error)};
}

Outcome lorentz_forms() {
  constexpr double inf = LorentzParams::kInf;
  const double m = 0.375;
  GriddedDensity ind(Grid::unit(1, 64));
  for (int c = 0; c < 24; ++c) ind.values[c] = 1.0;
  double worst_closed = 0.0;
  int outside = 0, checked = 0;
  std::mt19937_64 rng(31337);
  for (double p : {1.5, 2.0, 3.0}) {
    const double pc = p / (p - 1.0);
    for (double q : {1.0, 2.0, p, inf}) {
      const LorentzParams params(p, q);
      const double norm = std::isinf(q) ? std::pow(m, 1.0 / p) : std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
      const double maximal =
          std::isinf(q) ? std::pow(m, 1.0 / p) : std::pow(p * pc / q, 1.0 / q) * std::pow(m, 1.0 / p);
      worst_closed = std::max(worst_closed, testing::rel(lorentz_quasinorm(ind, params), norm));
      worst_closed = std::max(worst_closed, testing::rel(maximal_quasinorm(ind, params), maximal));
      for (int k = 0; k < 200; ++k) {
        const int d = 1 + k % 2;
        const GriddedDensity f = testing::random_density(rng, Grid::unit(d, d == 1 ? 40 : 8), 0.3);
        if (total_mass(f) == 0.0) continue;
        ++checked;
        if (!norm_equivalence_check(f, params).within) ++outside;
      }
    }
  }
  return {worst_closed <= 1e-10 && outside == 0,
          fmt("closed-form error %.3g, %g of %g random densities outside [1, p']", worst_closed, outside, checked)};
}

Outcome scaling_law() {
  double worst = 0.0;
  for (int d : {1, 2}) {
    const Grid g = Grid::unit(d, d == 1 ? 64 : 32);
    std::mt19937_64 rng(8 + d);
    const GriddedDensity f = testing::random_density(rng, g, 0.1);
    const AtomicMeasure mu = discretize_density(f);
    const AssignmentRegions r =
        AssignmentRegions::from_plan(solve_kp(mu, AtomicMeasure(d, {{{0.0, 0.0, 0}, total_mass(mu)}}), 0.0).plan);
    for (int k : {1, 2, 3}) {
      const double t = 1.0 - std::ldexp(1.0, -k);
      const GriddedDensity ft = interpolant_density(f, r, t, g.refined(1 << k));
      for (double p : {1.5, 2.0, 3.0})
        for (double q : {1.0, 2.0, p, LorentzParams::kInf}) {
          const LorentzParams params(p, q);
          const double expected = std::pow(1.0 - t, -params.dilation_exponent(d)) * lorentz_quasinorm(f, params);
          worst = std::max(worst, std::fabs(lorentz_quasinorm(ft, params) - expected) / expected);
        }
    }
  }
  return {worst <= 1e-6, fmt("max relative deviation %.3g", worst)};
}

Outcome run_config(const char* file, const char* command, double time_limit) {
  Scenario s = Scenario::load(std::string(OTD_CONFIG_DIR) + "/" + file);
  RunOptions o;
  o.write_files = false;
  const auto start = Clock::now();
  const Report r = run_experiment(s, command, o);
  const double elapsed = seconds_since(start);
  // first failing row, else the row closest to its bound
  const ResultRow* worst = nullptr;
  for (const ResultRow& row : r.rows) {
    if (!row.pass) {
      worst = &row;
      break;
    }
    if (std::isfinite(row.ratio) && (!worst || row.ratio > worst->ratio)) worst = &row;
  }
  const std::string where = worst ? fmt("ratio %.4g at ", worst->ratio) + worst->experiment + " [" + worst->parameters + "]" : "";
  return {r.all_pass() && !r.rows.empty() && elapsed < time_limit,
          fmt("%g rows, %g failing, %.2f s; ", static_cast<double>(r.rows.size()), static_cast<double>(r.failures()),
              elapsed) +
              where};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "otd_acceptance_cli";
  fs::remove_all(root);
  struct Run {
    const char* command;
    const char* config;
  };
  const Run runs[] = {{"solve", "prop25.json"},  {"sigma", "prop25.json"},  {"lorentz", "prop25.json"},
                      {"interp", "prop25.json"}, {"oracle", "prop25.json"}, {"prop21", "prop21.json"},
                      {"prop23", "prop23.json"}, {"prop25", "prop25.json"}};
  const struct {
    const char* dir;
    int threads;
  } variants[] = {{"t1", 1}, {"t4", 4}, {"t4_again", 4}};

  for (const auto& v : variants) {
    fs::create_directories(root / v.dir);
    for (const Run& run : runs) {
      std::ostringstream cmd;
      cmd << "cd \"" << (root / v.dir).string() << "\" && \"" << OTD_CLI_PATH << "\" " << run.command << " --config \""
          << OTD_CONFIG_DIR << "/" << run.config << "\" --out out --seed 7 --threads " << v.threads
          << " > " << run.command << ".stdout 2>&1";
      const int status = std::system(cmd.str().c_str());
      if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) > 1)
        return {false, std::string("CLI error running ") + run.command};
    }
  }

  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "t1")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "t1");
    const std::string reference = slurp(entry.path());
    for (const char* other : {"t4", "t4_again"})
      if (!fs::exists(root / other / rel) || slurp(root / other / rel) != reference)
        return {false, "differs: " + rel.string() + " (" + other + ")"};
    ++files;
  }
  for (const char* other : {"t4", "t4_again"}) {
    std::size_t count = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / other)) count += entry.is_regular_file();
    if (count != files) return {false, std::string("file count differs in ") + other};
  }
  fs::remove_all(root);
  return {files > 8, fmt("%g files identical across 3 runs (threads 1, 4, 4)", static_cast<double>(files))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact solver duality and brute force", duality},
      {"rasterizer exactness", rasterizer},
      {"Monte Carlo agreement", monte_carlo},
      {"Lorentz closed forms and equivalence", lorentz_forms},
      {"homothety scaling law", scaling_law},
      {"one-sided bound below d'", [] { return run_config("prop21.json", "prop21", 300.0); }},
      {"two-sided bound at p = d'", [] { return run_config("prop25.json", "prop25", 300.0); }},
      {"projection stability sweep", [] { return run_config("prop23.json", "prop23", 300.0); }},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
