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

#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "csv_io.hpp"
#include "error.hpp"
#include "interpolation.hpp"
#include "lorentz.hpp"
#include "oracles.hpp"
#include "ot_solver.hpp"
#include "parallel.hpp"
#include "transport_density.hpp"

namespace otd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    if (!on_) return kNaN;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) { return format_double(x); }

std::string pq_label(double p, double q) { return "p=" + fmt(p) + ";q=" + fmt(q); }

/// Collects rows for one command; rows carry the scenario and command names.
class Table {
 public:
  Table(const Scenario& s, std::string command) : scenario_(s.name), command_(std::move(command)) {}

  ResultRow make(const std::string& id, const std::string& params, double measured, double bound, double tol,
                 double runtime, bool strict = false) const {
    ResultRow r{scenario_, command_ + "/" + id, params, measured, bound, 0.0, false, runtime};
    if (measured == 0.0 && bound >= 0.0)
      r.ratio = 0.0;
    else if (bound > 0.0)
      r.ratio = measured / bound;
    else
      r.ratio = kInf;
    r.pass = std::isfinite(measured) && (strict ? r.ratio < 1.0 : r.ratio <= 1.0 + tol);
    return r;
  }

  /// A row that fails with the given reason in the parameter column.
  ResultRow refusal(const std::string& id, const std::string& params, double measured, double runtime) const {
    return ResultRow{scenario_, command_ + "/" + id, params, measured, kInf, kNaN, false, runtime};
  }

  const std::string& command() const { return command_; }

 private:
  std::string scenario_;
  std::string command_;
};

std::filesystem::path out_path(const Scenario& s, const std::string& command) {
  return std::filesystem::path(s.out_dir) / command;
}

void save(Report& report, const Scenario& s, const std::string& command, const std::string& name,
          const std::string& text, const RunOptions& o) {
  if (!o.write_files) return;
  const std::string path = (out_path(s, command) / name).string();
  write_text_file(path, text);
  report.files.push_back(path);
}

std::string density_text(const GriddedDensity& f) {
  std::ostringstream os;
  write_density_csv(os, f);
  return os.str();
}

void finish(Report& report, const Scenario& s, const std::string& command, const RunOptions& o) {
  if (!o.write_files) return;
  save(report, s, command, "config.resolved.json", s.to_json(), o);
  save(report, s, command, "results.csv", rows_csv(report.rows), o);
  for (const std::string& p : emit_plots(report.plots, out_path(s, command).string())) report.files.push_back(p);
}

double sigma_mass(const GriddedDensity& sigma) {
  double m = 0.0;
  for (double v : sigma.values) m += v;
  return m * sigma.grid.cell_volume();
}

double relative(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

/// Runs body(k) for k < count on the worker pool and concatenates the per-task rows in order.
void fan_out(Report& report, std::size_t count, const std::function<std::vector<ResultRow>(std::size_t)>& body) {
  std::vector<std::vector<ResultRow>> slots(count);
  parallel_for(count, [&](std::size_t k) { slots[k] = body(k); });
  for (auto& slot : slots) report.rows.insert(report.rows.end(), slot.begin(), slot.end());
}

int require_res(const Scenario& s) { return s.resolutions.front(); }

}  // namespace

bool Report::all_pass() const { return failures() == 0; }

std::size_t Report::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.pass; }));
}

double prop21_factor(int dim, double p) {
  // 1 / (1 - d/p') rewritten as p / (d - (d-1) p)
  const double denom = dim - (dim - 1.0) * p;
  return denom > 0.0 ? p / denom : kInf;
}

std::string rows_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "scenario,experiment,parameters,measured,bound,ratio,pass,runtime\n";
  for (const ResultRow& r : rows) {
    os << r.scenario << ',' << r.experiment << ',' << r.parameters << ',' << fmt(r.measured) << ',' << fmt(r.bound)
       << ',' << fmt(r.ratio) << ',' << (r.pass ? "true" : "false") << ','
       << (std::isnan(r.runtime) ? std::string() : fmt(r.runtime)) << '\n';
  }
  return os.str();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"solve", "sigma", "lorentz", "interp",
                                              "prop21", "prop23", "prop25", "oracle"};
  return names;
}

Report run_experiment(const Scenario& s, const std::string& command, const RunOptions& o) {
  s.validate();
  if (command == "solve") return run_solve(s, o);
  if (command == "sigma") return run_sigma(s, o);
  if (command == "lorentz") return run_lorentz(s, o);
  if (command == "interp") return run_interp(s, o);
  if (command == "prop21") return run_prop21(s, o);
  if (command == "prop23") return run_prop23(s, o);
  if (command == "prop25") return run_prop25(s, o);
  if (command == "oracle") return run_oracle(s, o);
  fail(ErrorCode::kInvalidArgument, "unknown experiment '" + command + "'");
}

// ---------------------------------------------------------------------------

Report run_solve(const Scenario& s, const RunOptions& o) {
  Table table(s, "solve");
  Report report;
  const int res = require_res(s);
  const AtomicMeasure mu = discretize_density(s.source_density(res));
  const AtomicMeasure nu = s.target_measure(res);
  std::vector<std::string> plans(s.eps.size()), duals(s.eps.size());
  fan_out(report, s.eps.size(), [&](std::size_t k) {
    const Stopwatch clock(o.timing);
    const double eps = s.eps[k];
    const KpSolution sol = solve_kp(mu, nu, eps);
    const double t = clock.seconds();
    const std::string par = "eps=" + fmt(eps) + ";res=" + std::to_string(res);
    std::vector<ResultRow> rows;
    rows.push_back(table.make("duality_gap", par, std::fabs(duality_gap(sol.plan, sol.duals)) / (1.0 + sol.cost),
                              s.tol.exact, 0.0, t));
    rows.push_back(table.make("marginals", par, sol.plan.marginal_violation(), s.tol.exact, 0.0, t));
    rows.push_back(table.make("dual_feasibility", par, std::max(0.0, dual_infeasibility(sol.plan, sol.duals)),
                              s.tol.exact, 0.0, t));
    if (eps == 0.0)
      rows.push_back(table.make("lip1", par, check_lip1(sol.plan.source, sol.duals), s.tol.exact, 0.0, t));

    std::ostringstream pl;
    pl << "i,j,mass,cost_ij\n";
    for (const PlanEntry& e : sol.plan.entries)
      pl << e.source << ',' << e.target << ',' << fmt(e.mass) << ','
         << fmt(power_cost(sol.plan.length(e), sol.plan.cost_exponent)) << '\n';
    plans[k] = pl.str();
    std::ostringstream du;
    du << "side,index,value\n";
    for (std::size_t i = 0; i < sol.duals.u.size(); ++i) du << "source," << i << ',' << fmt(sol.duals.u[i]) << '\n';
    for (std::size_t j = 0; j < sol.duals.w.size(); ++j) du << "target," << j << ',' << fmt(sol.duals.w[j]) << '\n';
    duals[k] = du.str();
    return rows;
  });
  for (std::size_t k = 0; k < s.eps.size(); ++k) {
    save(report, s, "solve", "plan_eps=" + fmt(s.eps[k]) + ".csv", plans[k], o);
    save(report, s, "solve", "duals_eps=" + fmt(s.eps[k]) + ".csv", duals[k], o);
  }
  finish(report, s, "solve", o);
  return report;
}

Report run_sigma(const Scenario& s, const RunOptions& o) {
  Table table(s, "sigma");
  Report report;
  const int res = require_res(s);
  const Grid grid = s.grid(res);
  const AtomicMeasure mu = discretize_density(s.source_density(res));
  const AtomicMeasure nu = s.target_measure(res);
  std::vector<std::string> sigmas(s.eps.size()), flows(s.eps.size());
  fan_out(report, s.eps.size(), [&](std::size_t k) {
    const Stopwatch clock(o.timing);
    const KpSolution sol = solve_kp(mu, nu, s.eps[k]);
    const GriddedDensity sigma = rasterize_sigma(sol.plan, grid);
    const CellVectorField flow = rasterize_flow(sol.plan, grid);
    double excess = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
      excess = std::max(excess, flow.magnitude(c) - sigma.values[c]);
    std::vector<Polynomial::Term> terms;
    for (int d = 0; d < s.dim; ++d) {
      std::array<int, kMaxDim> power{0, 0, 0};
      power[d] = 1;
      terms.push_back({1.0 + d, power});
    }
    const Polynomial affine(terms);
    const double t = clock.seconds();
    const std::string par = "eps=" + fmt(s.eps[k]) + ";res=" + std::to_string(res);
    const double cost1 = sol.plan.cost(1.0);
    std::vector<ResultRow> rows;
    rows.push_back(table.make("mass_cost_identity", par, relative(sigma_mass(sigma), cost1), s.tol.exact, 0.0, t));
    rows.push_back(table.make("flow_below_sigma", par, excess, s.tol.exact, 0.0, t));
    rows.push_back(table.make("divergence_affine", par, divergence_residual(sol.plan, flow, affine) / (1.0 + cost1),
                              s.tol.exact, 0.0, t));
    sigmas[k] = density_text(sigma);
    std::ostringstream fs;
    write_vector_field_csv(fs, grid, flow.vectors);
    flows[k] = fs.str();
    return rows;
  });
  for (std::size_t k = 0; k < s.eps.size(); ++k) {
    save(report, s, "sigma", "sigma_eps=" + fmt(s.eps[k]) + ".csv", sigmas[k], o);
    save(report, s, "sigma", "flow_eps=" + fmt(s.eps[k]) + ".csv", flows[k], o);
  }
  finish(report, s, "sigma", o);
  return report;
}

Report run_lorentz(const Scenario& s, const RunOptions& o) {
  Table table(s, "lorentz");
  Report report;
  const int res = require_res(s);
  const GriddedDensity f = s.source_density(res);
  struct Cell {
    double p, q, quasi, maximal, ratio;
  };
  std::vector<Cell> cells;
  for (double p : s.p)
    for (double q : s.q) cells.push_back({p, Scenario::resolve_q(p, q), 0, 0, 0});
  fan_out(report, cells.size(), [&](std::size_t k) {
    const Stopwatch clock(o.timing);
    Cell& c = cells[k];
    const LorentzParams params(c.p, c.q);
    const EquivalenceCheck eq = norm_equivalence_check(f, params);
    c.quasi = lorentz_quasinorm(f, params);
    c.maximal = maximal_quasinorm(f, params);
    c.ratio = eq.ratio;
    ResultRow row = table.make("equivalence", pq_label(c.p, c.q) + ";res=" + std::to_string(res), eq.ratio,
                               params.p_conjugate(), 1e-8, clock.seconds());
    row.pass = eq.within;
    return std::vector<ResultRow>{row};
  });
  std::ostringstream tab;
  tab << "p,q,quasinorm,maximal_norm,ratio\n";
  for (const Cell& c : cells)
    tab << fmt(c.p) << ',' << fmt(c.q) << ',' << fmt(c.quasi) << ',' << fmt(c.maximal) << ',' << fmt(c.ratio) << '\n';
  save(report, s, "lorentz", "norms.csv", tab.str(), o);
  const StepProfile star = decreasing_rearrangement(f);
  std::ostringstream prof;
  prof << "t,level\n0," << fmt(star.levels.front()) << '\n';
  for (std::size_t k = 0; k < star.breakpoints.size(); ++k)
    prof << fmt(star.breakpoints[k]) << ',' << fmt(star.levels[k + 1]) << '\n';
  save(report, s, "lorentz", "rearrangement.csv", prof.str(), o);
  finish(report, s, "lorentz", o);
  return report;
}

Report run_interp(const Scenario& s, const RunOptions& o) {
  Table table(s, "interp");
  Report report;
  const int res = require_res(s);
  const Grid grid = s.grid(res);
  const GriddedDensity fp = s.source_density(res);
  const AtomicMeasure mu = discretize_density(fp);
  const AtomicMeasure nu = s.target_measure(res);
  std::vector<std::string> curves(s.eps.size());
  fan_out(report, s.eps.size(), [&](std::size_t k) {
    const Stopwatch clock(o.timing);
    const double eps = s.eps[k];
    const KpSolution sol = solve_kp(mu, nu, eps);
    const SigmaBound b = sigma_interpolation_bound(sol.plan, grid, s.quad_nodes);
    const double smax = *std::max_element(b.lhs.values.begin(), b.lhs.values.end());
    const std::string par = "eps=" + fmt(eps) + ";res=" + std::to_string(res);
    std::vector<ResultRow> rows;
    rows.push_back(table.make("sigma_bound", par + ";nodes=" + std::to_string(s.quad_nodes),
                              std::max(0.0, b.max_defect), s.tol.binning * smax, 0.0, clock.seconds()));
    const AssignmentRegions regions = AssignmentRegions::from_plan(sol.plan);
    std::ostringstream curve;
    curve << "t,mass,norm,envelope\n";
    for (double t : s.t_samples) {
      if (t >= 1.0) continue;
      const GriddedDensity ft = interpolant_density(fp, regions, t);
      const double m = total_mass(ft);
      rows.push_back(table.make("mass", par + ";t=" + fmt(t), relative(m, 1.0), s.tol.exact, 0.0, clock.seconds()));
      curve << fmt(t) << ',' << fmt(m);
      if (!s.p.empty() && !s.q.empty() && !s.target_is_atomic() && eps > 0.0) {
        const LorentzParams params(s.p.front(), Scenario::resolve_q(s.p.front(), s.q.front()));
        const GriddedDensity fm = s.target_as_density(res);
        const double env =
            two_sided_envelope(t, s.dim, params, lorentz_quasinorm(fp, params), lorentz_quasinorm(fm, params));
        curve << ',' << fmt(lorentz_quasinorm(ft, params)) << ',' << fmt(env);
      } else {
        curve << ",,";
      }
      curve << '\n';
    }
    curves[k] = curve.str();
    return rows;
  });
  for (std::size_t k = 0; k < s.eps.size(); ++k)
    save(report, s, "interp", "interpolant_eps=" + fmt(s.eps[k]) + ".csv", curves[k], o);
  finish(report, s, "interp", o);
  return report;
}

// ---------------------------------------------------------------------------

Report run_prop21(const Scenario& s, const RunOptions& o) {
  Table table(s, "prop21");
  Report report;
  require(s.target_is_atomic(), ErrorCode::kUnsupported, "prop21 needs an atomic target");
  const std::size_t np = s.p.size() * s.q.size();
  std::vector<std::vector<double>> ratios(s.resolutions.size(), std::vector<double>(np, kNaN));
  const double d_prime = s.dim == 1 ? kInf : s.dim / (s.dim - 1.0);

  fan_out(report, s.resolutions.size(), [&](std::size_t r) {
    const Stopwatch clock(o.timing);
    const int res = s.resolutions[r];
    const Grid grid = s.grid(res);
    const GriddedDensity fp = s.source_density(res);
    const KpSolution sol = solve_kp(discretize_density(fp), s.target_measure(res), 0.0);
    const GriddedDensity sigma = rasterize_sigma(sol.plan, grid);
    const std::string rs = ";res=" + std::to_string(res);
    std::vector<ResultRow> rows;
    rows.push_back(table.make("mass_cost_identity", "res=" + std::to_string(res),
                              relative(sigma_mass(sigma), sol.plan.cost(1.0)), s.tol.exact, 0.0, clock.seconds()));
    std::size_t k = 0;
    for (double p : s.p)
      for (double qe : s.q) {
        const double q = Scenario::resolve_q(p, qe);
        const LorentzParams params(p, q);
        const double ns = lorentz_quasinorm(sigma, params);
        const double factor = prop21_factor(s.dim, p);
        if (!std::isfinite(factor)) {
          rows.push_back(table.refusal("bound_vacuous",
                                       pq_label(p, q) + rs + ";reason=p>=d/(d-1)=" + fmt(d_prime), ns,
                                       clock.seconds()));
        } else {
          const double nf = lorentz_quasinorm(fp, params);
          ratios[r][k] = ns / (factor * nf);
          rows.push_back(table.make("bound", pq_label(p, q) + rs + ";factor=" + fmt(factor), ns,
                                    s.c_fit * factor * nf, 0.0, clock.seconds()));
        }
        ++k;
      }
    return rows;
  });

  std::size_t k = 0;
  Plot plot{"prop21_ratio", "measured ratio vs resolution", "cells per axis", "ratio", {}};
  for (double p : s.p)
    for (double qe : s.q) {
      const double q = Scenario::resolve_q(p, qe);
      Series series{pq_label(p, q), {}, {}};
      for (std::size_t r = 0; r < s.resolutions.size(); ++r) {
        series.x.push_back(s.resolutions[r]);
        series.y.push_back(ratios[r][k]);
        if (r == 0 || !std::isfinite(ratios[r][k])) continue;
        const double change = relative(ratios[r][k], ratios[r - 1][k]);
        report.rows.push_back(table.make("stability",
                                         pq_label(p, q) + ";res=" + std::to_string(s.resolutions[r - 1]) + "->" +
                                             std::to_string(s.resolutions[r]),
                                         change, s.tol.stability, 0.0, kNaN));
      }
      if (std::isfinite(prop21_factor(s.dim, p))) plot.series.push_back(series);
      ++k;
    }
  if (!plot.series.empty()) report.plots.push_back(plot);
  finish(report, s, "prop21", o);
  return report;
}

Report run_prop23(const Scenario& s, const RunOptions& o) {
  Table table(s, "prop23");
  Report report;
  const int res = require_res(s);
  const Grid grid = s.grid(res);
  const Grid box = s.grid(1);
  const GriddedDensity fp = s.source_density(res);
  const AtomicMeasure mu = discretize_density(fp);
  const AtomicMeasure nu = s.target_measure(res);
  const std::size_t count = s.projection_n.size();

  // index count is the unprojected target
  std::vector<GriddedDensity> sigmas(count + 1, GriddedDensity(grid));
  std::vector<double> seconds(count + 1, kNaN);
  parallel_for(count + 1, [&](std::size_t k) {
    const Stopwatch clock(o.timing);
    const AtomicMeasure target = k < count ? project_to_grid(nu, s.projection_n[k], box) : nu;
    sigmas[k] = rasterize_sigma(solve_kp(mu, target, 0.0).plan, grid);
    seconds[k] = clock.seconds();
  });

  double side = 0.0;
  for (int d = 0; d < s.dim; ++d) side = std::max(side, s.domain_hi[d] - s.domain_lo[d]);
  for (std::size_t k = 0; k < count; ++k) {
    const int n = s.projection_n[k];
    const std::string par = "n=" + std::to_string(n);
    report.rows.push_back(table.make("projection_atoms", par,
                                     static_cast<double>(project_to_grid(nu, n, box).size()),
                                     std::pow(n * side + 2.0, s.dim), 0.0, seconds[k]));
    report.rows.push_back(table.make("projection_mass", par, relative(total_mass(project_to_grid(nu, n, box)), 1.0),
                                     s.tol.exact, 0.0, seconds[k]));
  }

  // L1 Cauchy differences across n-doubling must shrink strictly.
  std::vector<double> diffs;
  std::vector<int> diff_n, diff_next;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    diffs.push_back(l1_distance(sigmas[k + 1], sigmas[k]));
    diff_n.push_back(s.projection_n[k]);
    diff_next.push_back(s.projection_n[k + 1]);
  }
  Plot cauchy{"prop23_cauchy", "L1 distance between consecutive projections", "n", "L1 difference", {}};
  Series cs{"sigma_next - sigma_n", {}, {}};
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    cs.x.push_back(diff_n[k]);
    cs.y.push_back(diffs[k]);
    if (k == 0) continue;
    const std::string par = "pair=" + std::to_string(diff_n[k]) + "/" + std::to_string(diff_next[k]) + ";previous=" +
                            std::to_string(diff_n[k - 1]) + "/" + std::to_string(diff_next[k - 1]);
    ResultRow row = table.make("cauchy_l1", par, diffs[k], diffs[k - 1], 0.0, kNaN, true);
    if (diffs[k] <= s.tol.exact && diffs[k - 1] <= s.tol.exact) row.pass = true;  // already converged
    report.rows.push_back(row);
  }
  if (!cs.x.empty()) {
    cauchy.series.push_back(cs);
    report.plots.push_back(cauchy);
  }

  Plot norms{"prop23_norms", "Lorentz norm of sigma_n", "n", "quasinorm", {}};
  for (double p : s.p)
    for (double qe : s.q) {
      const double q = Scenario::resolve_q(p, qe);
      const LorentzParams params(p, q);
      const double factor = prop21_factor(s.dim, p);
      const double nf = lorentz_quasinorm(fp, params);
      Series series{pq_label(p, q), {}, {}};
      double max_norm = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        const double ns = lorentz_quasinorm(sigmas[k], params);
        max_norm = std::max(max_norm, ns);
        series.x.push_back(s.projection_n[k]);
        series.y.push_back(ns);
        const std::string par = pq_label(p, q) + ";n=" + std::to_string(s.projection_n[k]);
        if (std::isfinite(factor))
          report.rows.push_back(table.make("norm_bounded", par, ns, s.c_fit * factor * nf, 0.0, kNaN));
        else
          report.rows.push_back(table.refusal("bound_vacuous", par + ";reason=p>=d/(d-1)", ns, kNaN));
      }
      const double final_norm = lorentz_quasinorm(sigmas[count], params);
      report.rows.push_back(table.make("liminf", pq_label(p, q), final_norm, max_norm, s.tol.binning, seconds[count]));
      norms.series.push_back(series);
    }
  if (count > 0) report.plots.push_back(norms);
  finish(report, s, "prop23", o);
  return report;
}

Report run_prop25(const Scenario& s, const RunOptions& o) {
  Table table(s, "prop25");
  Report report;
  require(!s.target_is_atomic(), ErrorCode::kUnsupported, "prop25 needs the target given as a density");
  require(!s.eps.empty(), ErrorCode::kInvalidArgument, "prop25 needs a nonempty eps list");
  for (double e : s.eps)
    require(e > 0.0, ErrorCode::kInvalidArgument, "eps = 0 rejected: two-sided bound requires strictly convex cost");
  const int res = require_res(s);
  const Grid grid = s.grid(res);
  const GriddedDensity fp = s.source_density(res);
  const GriddedDensity fm = s.target_as_density(res);
  const AtomicMeasure mu = discretize_density(fp);
  const AtomicMeasure nu = discretize_density(fm);

  std::vector<LorentzParams> params;
  for (double p : s.p)
    for (double q : s.q) params.emplace_back(p, Scenario::resolve_q(p, q));
  const std::size_t ne = s.eps.size(), np = params.size();
  std::vector<std::vector<double>> sigma_norm(ne, std::vector<double>(np));
  std::vector<std::vector<NormCurve>> curves(ne, std::vector<NormCurve>(np));

  fan_out(report, ne, [&](std::size_t e) {
    const Stopwatch clock(o.timing);
    const KpSolution sol = solve_kp(mu, nu, s.eps[e]);
    const GriddedDensity sigma = rasterize_sigma(sol.plan, grid);
    std::vector<ResultRow> rows;
    for (std::size_t k = 0; k < np; ++k) {
      const LorentzParams& pr = params[k];
      curves[e][k] = interpolant_norm_curve(fp, fm, sol.plan, pr, s.t_samples);
      const std::string par = "eps=" + fmt(s.eps[e]) + ";" + pq_label(pr.p(), pr.q());
      for (const NormCurvePoint& pt : curves[e][k].points)
        rows.push_back(table.make("envelope", par + ";t=" + fmt(pt.t), pt.norm, pt.envelope, s.tol.binning,
                                  clock.seconds()));
      sigma_norm[e][k] = lorentz_quasinorm(sigma, pr);
      ResultRow fin = table.make("sigma_finite", par, sigma_norm[e][k], kInf, 0.0, clock.seconds());
      fin.ratio = 0.0;
      fin.pass = std::isfinite(sigma_norm[e][k]);
      rows.push_back(fin);
    }
    return rows;
  });

  // stability against the smallest eps
  const std::size_t ref = static_cast<std::size_t>(std::min_element(s.eps.begin(), s.eps.end()) - s.eps.begin());
  for (std::size_t k = 0; k < np; ++k) {
    Plot curve_plot{"prop25_curve_" + pq_label(params[k].p(), params[k].q()), "interpolant norm vs t", "t",
                    "quasinorm", {}};
    Plot eps_plot{"prop25_sigma_" + pq_label(params[k].p(), params[k].q()), "sigma norm vs eps", "eps",
                  "sigma quasinorm", {}};
    Series sig{"sigma", {}, {}};
    for (std::size_t e = 0; e < ne; ++e) {
      Series c{"eps=" + fmt(s.eps[e]), {}, {}};
      for (const NormCurvePoint& pt : curves[e][k].points) {
        c.x.push_back(pt.t);
        c.y.push_back(pt.norm);
      }
      curve_plot.series.push_back(c);
      sig.x.push_back(s.eps[e]);
      sig.y.push_back(sigma_norm[e][k]);
      if (e == ref) continue;
      report.rows.push_back(table.make("eps_stability",
                                       "eps=" + fmt(s.eps[e]) + "vs" + fmt(s.eps[ref]) + ";" +
                                           pq_label(params[k].p(), params[k].q()),
                                       relative(sigma_norm[e][k], sigma_norm[ref][k]), s.tol.stability, 0.0, kNaN));
    }
    Series env{"envelope", {}, {}};
    for (const NormCurvePoint& pt : curves[ref][k].points) {
      env.x.push_back(pt.t);
      env.y.push_back(pt.envelope);
    }
    curve_plot.series.push_back(env);
    eps_plot.series.push_back(sig);
    report.plots.push_back(curve_plot);
    report.plots.push_back(eps_plot);
  }
  finish(report, s, "prop25", o);
  return report;
}

Report run_oracle(const Scenario& s, const RunOptions& o) {
  Table table(s, "oracle");
  Report report;
  const int res = require_res(s);
  const Grid grid = s.grid(res);
  const GriddedDensity fp = s.source_density(res);
  const double eps = s.eps.front();
  {
    const Stopwatch clock(o.timing);
    const KpSolution sol = solve_kp(discretize_density(fp), s.target_measure(res), eps);
    const oracle::McSigma mc = oracle::mc_sigma(sol.plan, grid, s.mc_samples, s.seed);
    const double l1 = l1_distance(mc.sigma, rasterize_sigma(sol.plan, grid));
    report.rows.push_back(table.make("mc_sigma",
                                     "eps=" + fmt(eps) + ";res=" + std::to_string(res) +
                                         ";samples=" + std::to_string(s.mc_samples) + ";seed=" + std::to_string(s.seed),
                                     l1, s.tol.mc_sigmas * mc.l1_std_error, 0.0, clock.seconds()));
    save(report, s, "oracle", "mc_sigma.csv", density_text(mc.sigma), o);
  }
  {
    // Sampled upper level-set measures vs exact ones, against the DKW radius at 99%.
    const Stopwatch clock(o.timing);
    const std::uint64_t n = std::clamp<std::uint64_t>(s.mc_samples, 100'000, 10'000'000);
    const StepProfile sampled = oracle::sampled_rearrangement(fp, n, s.seed);
    const StepProfile exact = decreasing_rearrangement(fp);
    const double volume = grid.domain_volume();
    auto level_measure = [](const StepProfile& star, double level) {
      double m = 0.0;
      for (std::size_t k = 0; k < star.breakpoints.size(); ++k)
        if (star.levels[k] > level) m = star.breakpoints[k];
      return m;
    };
    double worst = 0.0;
    for (double level : exact.levels)
      worst = std::max(worst, std::fabs(level_measure(sampled, level) - level_measure(exact, level)) / volume);
    report.rows.push_back(table.make("rearrangement_dkw",
                                     "res=" + std::to_string(res) + ";samples=" + std::to_string(n) +
                                         ";seed=" + std::to_string(s.seed) + ";alpha=0.01",
                                     worst, oracle::dkw_radius(n, 0.01), 0.0, clock.seconds()));
  }
  finish(report, s, "oracle", o);
  return report;
}

}  // namespace otd
