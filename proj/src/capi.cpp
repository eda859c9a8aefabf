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

#include "otdensity/otdensity.h"

#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "csv_io.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "interpolation.hpp"
#include "lorentz.hpp"
#include "oracles.hpp"
#include "ot_solver.hpp"
#include "parallel.hpp"
#include "scenario.hpp"
#include "transport_density.hpp"

struct otd_grid {
  otd::Grid grid;
};
struct otd_density {
  otd::GriddedDensity density;
};
struct otd_measure {
  otd::AtomicMeasure measure;
};
struct otd_solution {
  otd::KpSolution solution;
};
struct otd_field {
  otd::CellVectorField field;
};
struct otd_scenario {
  otd::Scenario scenario;
  std::string json;
};
struct otd_report {
  otd::Report report;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

otd_status to_status(otd::ErrorCode code) {
  switch (code) {
    case otd::ErrorCode::kInvalidArgument: return OTD_ERR_INVALID_ARGUMENT;
    case otd::ErrorCode::kEmptyMeasure: return OTD_ERR_EMPTY_MEASURE;
    case otd::ErrorCode::kMassImbalance: return OTD_ERR_MASS_IMBALANCE;
    case otd::ErrorCode::kOutOfDomain: return OTD_ERR_OUT_OF_DOMAIN;
    case otd::ErrorCode::kMismatch: return OTD_ERR_MISMATCH;
    case otd::ErrorCode::kUnsupported: return OTD_ERR_UNSUPPORTED;
    case otd::ErrorCode::kSizeCap: return OTD_ERR_SIZE_CAP;
    case otd::ErrorCode::kIo: return OTD_ERR_IO;
    case otd::ErrorCode::kParse: return OTD_ERR_PARSE;
    case otd::ErrorCode::kInternal: return OTD_ERR_INTERNAL;
  }
  return OTD_ERR_INTERNAL;
}

template <class F>
otd_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return OTD_OK;
  } catch (const otd::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OTD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OTD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return OTD_ERR_INTERNAL;
  }
}

#define OTD_NOT_NULL(...)                                                  \
  do {                                                                     \
    const void* ptrs_[] = {__VA_ARGS__};                                   \
    for (const void* p_ : ptrs_)                                           \
      if (p_ == nullptr) {                                                 \
        g_last_error = "null argument";                                    \
        return OTD_ERR_NULL_ARGUMENT;                                      \
      }                                                                    \
  } while (0)

template <class Handle, class... Args>
void emit(Handle** out, Args&&... args) {
  *out = new Handle{std::forward<Args>(args)...};
}

std::span<const double> span_of(const double* p, int dim) { return {p, static_cast<std::size_t>(dim)}; }

}  // namespace

extern "C" {

const char* otd_version(void) { return "1.0.0"; }

const char* otd_last_error(void) { return g_last_error.c_str(); }

const char* otd_status_string(otd_status status) {
  switch (status) {
    case OTD_OK: return "ok";
    case OTD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OTD_ERR_EMPTY_MEASURE: return "empty measure";
    case OTD_ERR_MASS_IMBALANCE: return "mass imbalance";
    case OTD_ERR_OUT_OF_DOMAIN: return "out of domain";
    case OTD_ERR_MISMATCH: return "mismatch";
    case OTD_ERR_UNSUPPORTED: return "unsupported";
    case OTD_ERR_SIZE_CAP: return "size cap";
    case OTD_ERR_IO: return "i/o error";
    case OTD_ERR_PARSE: return "parse error";
    case OTD_ERR_INTERNAL: return "internal error";
    case OTD_ERR_NULL_ARGUMENT: return "null argument";
  }
  return "unknown status";
}

otd_status otd_set_threads(int threads) {
  return guarded([&] {
    otd::require(threads >= 1, otd::ErrorCode::kInvalidArgument, "thread count must be >= 1");
    otd::set_thread_count(threads);
  });
}

int otd_get_threads(void) { return otd::thread_count(); }

// ---- grids

otd_status otd_grid_create(int dim, const double* lo, const double* hi, const int* res, otd_grid** out) {
  OTD_NOT_NULL(lo, hi, res, out);
  return guarded([&] {
    otd::require(dim >= 1 && dim <= otd::kMaxDim, otd::ErrorCode::kInvalidArgument, "dim must be 1, 2 or 3");
    emit(out, otd::Grid(dim, span_of(lo, dim), span_of(hi, dim), std::span<const int>(res, dim)));
  });
}

otd_status otd_grid_create_unit(int dim, int n, otd_grid** out) {
  OTD_NOT_NULL(out);
  return guarded([&] { emit(out, otd::Grid::unit(dim, n)); });
}

void otd_grid_destroy(otd_grid* grid) { delete grid; }
int otd_grid_dim(const otd_grid* grid) { return grid ? grid->grid.dim() : 0; }
size_t otd_grid_cell_count(const otd_grid* grid) { return grid ? grid->grid.cell_count() : 0; }
double otd_grid_cell_volume(const otd_grid* grid) { return grid ? grid->grid.cell_volume() : 0.0; }

// ---- densities

otd_status otd_density_create(const otd_grid* grid, const double* values, size_t count, otd_density** out) {
  OTD_NOT_NULL(grid, values, out);
  return guarded([&] {
    otd::require(count == grid->grid.cell_count(), otd::ErrorCode::kMismatch, "value count differs from cell count");
    emit(out, otd::GriddedDensity(grid->grid, std::vector<double>(values, values + count)));
  });
}

otd_status otd_density_read_csv(const char* path, otd_density** out) {
  OTD_NOT_NULL(path, out);
  return guarded([&] { emit(out, otd::read_density_csv(std::string(path))); });
}

otd_status otd_density_write_csv(const otd_density* density, const char* path) {
  OTD_NOT_NULL(density, path);
  return guarded([&] { otd::write_density_csv(std::string(path), density->density); });
}

void otd_density_destroy(otd_density* density) { delete density; }

otd_status otd_density_values(const otd_density* density, const double** values, size_t* count) {
  OTD_NOT_NULL(density, values, count);
  *values = density->density.values.data();
  *count = density->density.values.size();
  return OTD_OK;
}

otd_status otd_density_grid(const otd_density* density, otd_grid** out) {
  OTD_NOT_NULL(density, out);
  return guarded([&] { emit(out, density->density.grid); });
}

double otd_density_mass(const otd_density* density) { return density ? otd::total_mass(density->density) : 0.0; }

// ---- measures

otd_status otd_measure_create(int dim, const double* points, const double* masses, size_t count, otd_measure** out) {
  OTD_NOT_NULL(out);
  if (count > 0) OTD_NOT_NULL(points, masses);
  return guarded([&] {
    otd::require(dim >= 1 && dim <= otd::kMaxDim, otd::ErrorCode::kInvalidArgument, "dim must be 1, 2 or 3");
    std::vector<otd::Atom> atoms(count);
    for (size_t i = 0; i < count; ++i) {
      for (int k = 0; k < dim; ++k) atoms[i].x[k] = points[i * dim + k];
      atoms[i].mass = masses[i];
    }
    emit(out, otd::AtomicMeasure(dim, std::move(atoms)));
  });
}

otd_status otd_measure_from_density(const otd_density* density, otd_measure** out) {
  OTD_NOT_NULL(density, out);
  return guarded([&] { emit(out, otd::discretize_density(density->density)); });
}

otd_status otd_measure_project(const otd_measure* measure, int n, const otd_grid* box, otd_measure** out) {
  OTD_NOT_NULL(measure, box, out);
  return guarded([&] {
    otd::require(n >= 1, otd::ErrorCode::kInvalidArgument, "n must be >= 1");
    emit(out, otd::project_to_grid(measure->measure, n, box->grid));
  });
}

otd_status otd_measure_read_csv(const char* path, int dim, otd_measure** out) {
  OTD_NOT_NULL(path, out);
  return guarded([&] { emit(out, otd::read_atoms_csv(std::string(path), dim)); });
}

otd_status otd_measure_write_csv(const otd_measure* measure, const char* path) {
  OTD_NOT_NULL(measure, path);
  return guarded([&] { otd::write_atoms_csv(std::string(path), measure->measure); });
}

void otd_measure_destroy(otd_measure* measure) { delete measure; }
size_t otd_measure_size(const otd_measure* measure) { return measure ? measure->measure.size() : 0; }
int otd_measure_dim(const otd_measure* measure) { return measure ? measure->measure.dim() : 0; }

otd_status otd_measure_atom(const otd_measure* measure, size_t index, double* point, double* mass) {
  OTD_NOT_NULL(measure);
  return guarded([&] {
    otd::require(index < measure->measure.size(), otd::ErrorCode::kInvalidArgument, "atom index out of range");
    const otd::Atom& a = measure->measure[index];
    if (point)
      for (int k = 0; k < measure->measure.dim(); ++k) point[k] = a.x[k];
    if (mass) *mass = a.mass;
  });
}

double otd_measure_mass(const otd_measure* measure) { return measure ? otd::total_mass(measure->measure) : 0.0; }

// ---- transport

otd_status otd_solve(const otd_measure* source, const otd_measure* target, double eps, otd_solution** out) {
  OTD_NOT_NULL(source, target, out);
  return guarded([&] { emit(out, otd::solve_kp(source->measure, target->measure, eps)); });
}

void otd_solution_destroy(otd_solution* solution) { delete solution; }
double otd_solution_cost(const otd_solution* s) { return s ? s->solution.cost : NAN; }
double otd_solution_cost_exponent(const otd_solution* s) { return s ? s->solution.plan.cost_exponent : NAN; }

double otd_solution_duality_gap(const otd_solution* s) {
  return s ? otd::duality_gap(s->solution.plan, s->solution.duals) : NAN;
}

double otd_solution_marginal_violation(const otd_solution* s) {
  return s ? s->solution.plan.marginal_violation() : NAN;
}

size_t otd_solution_entry_count(const otd_solution* s) { return s ? s->solution.plan.entries.size() : 0; }

otd_status otd_solution_entry(const otd_solution* s, size_t k, size_t* source, size_t* target, double* mass) {
  OTD_NOT_NULL(s);
  return guarded([&] {
    otd::require(k < s->solution.plan.entries.size(), otd::ErrorCode::kInvalidArgument, "entry index out of range");
    const otd::PlanEntry& e = s->solution.plan.entries[k];
    if (source) *source = e.source;
    if (target) *target = e.target;
    if (mass) *mass = e.mass;
  });
}

otd_status otd_solution_potentials(const otd_solution* s, const double** u, size_t* u_count, const double** w,
                                   size_t* w_count) {
  OTD_NOT_NULL(s);
  if (u) *u = s->solution.duals.u.data();
  if (u_count) *u_count = s->solution.duals.u.size();
  if (w) *w = s->solution.duals.w.data();
  if (w_count) *w_count = s->solution.duals.w.size();
  return OTD_OK;
}

otd_status otd_solution_lip1_violation(const otd_solution* s, double* violation) {
  OTD_NOT_NULL(s, violation);
  return guarded([&] { *violation = otd::check_lip1(s->solution.plan.source, s->solution.duals); });
}

otd_status otd_solution_write_csv(const otd_solution* s, const char* plan_path, const char* duals_path) {
  OTD_NOT_NULL(s);
  return guarded([&] {
    const otd::TransportPlan& plan = s->solution.plan;
    if (plan_path) {
      std::string text = "i,j,mass,cost_ij\n";
      for (const otd::PlanEntry& e : plan.entries)
        text += std::to_string(e.source) + ',' + std::to_string(e.target) + ',' + otd::format_double(e.mass) + ',' +
                otd::format_double(otd::power_cost(plan.length(e), plan.cost_exponent)) + '\n';
      otd::write_text_file(plan_path, text);
    }
    if (duals_path) {
      std::string text = "side,index,value\n";
      const otd::DualPotentials& d = s->solution.duals;
      for (size_t i = 0; i < d.u.size(); ++i) text += "source," + std::to_string(i) + ',' + otd::format_double(d.u[i]) + '\n';
      for (size_t j = 0; j < d.w.size(); ++j) text += "target," + std::to_string(j) + ',' + otd::format_double(d.w[j]) + '\n';
      otd::write_text_file(duals_path, text);
    }
  });
}

otd_status otd_brute_transport(const otd_measure* source, const otd_measure* target, double eps, double* cost,
                               size_t* permutation) {
  OTD_NOT_NULL(source, target, cost);
  return guarded([&] {
    const otd::oracle::BruteTransport b = otd::oracle::brute_transport(source->measure, target->measure, eps);
    *cost = b.cost;
    if (permutation)
      for (size_t i = 0; i < b.permutation.size(); ++i) permutation[i] = b.permutation[i];
  });
}

// ---- transport density

otd_status otd_rasterize_sigma(const otd_solution* s, const otd_grid* grid, otd_density** out) {
  OTD_NOT_NULL(s, grid, out);
  return guarded([&] { emit(out, otd::rasterize_sigma(s->solution.plan, grid->grid)); });
}

otd_status otd_rasterize_flow(const otd_solution* s, const otd_grid* grid, otd_field** out) {
  OTD_NOT_NULL(s, grid, out);
  return guarded([&] { emit(out, otd::rasterize_flow(s->solution.plan, grid->grid)); });
}

void otd_field_destroy(otd_field* field) { delete field; }

otd_status otd_field_vector(const otd_field* field, size_t cell, double* vector) {
  OTD_NOT_NULL(field, vector);
  return guarded([&] {
    otd::require(cell < field->field.vectors.size(), otd::ErrorCode::kInvalidArgument, "cell index out of range");
    for (int k = 0; k < field->field.grid.dim(); ++k) vector[k] = field->field.vectors[cell][k];
  });
}

otd_status otd_field_write_csv(const otd_field* field, const char* path) {
  OTD_NOT_NULL(field, path);
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    otd::require(static_cast<bool>(os), otd::ErrorCode::kIo, std::string("cannot open '") + path + "' for writing");
    otd::write_vector_field_csv(os, field->field.grid, field->field.vectors);
  });
}

otd_status otd_mc_sigma(const otd_solution* s, const otd_grid* grid, uint64_t samples, uint64_t seed,
                        otd_density** out, double* l1_std_error) {
  OTD_NOT_NULL(s, grid, out);
  return guarded([&] {
    otd::oracle::McSigma mc = otd::oracle::mc_sigma(s->solution.plan, grid->grid, samples, seed);
    if (l1_std_error) *l1_std_error = mc.l1_std_error;
    emit(out, std::move(mc.sigma));
  });
}

otd_status otd_l1_distance(const otd_density* a, const otd_density* b, double* out) {
  OTD_NOT_NULL(a, b, out);
  return guarded([&] { *out = otd::l1_distance(a->density, b->density); });
}

// ---- Lorentz

otd_status otd_lorentz_norm(const otd_density* density, double p, double q, double* out) {
  OTD_NOT_NULL(density, out);
  return guarded([&] { *out = otd::lorentz_quasinorm(density->density, otd::LorentzParams(p, q)); });
}

otd_status otd_maximal_norm(const otd_density* density, double p, double q, double* out) {
  OTD_NOT_NULL(density, out);
  return guarded([&] { *out = otd::maximal_quasinorm(density->density, otd::LorentzParams(p, q)); });
}

otd_status otd_norm_equivalence(const otd_density* density, double p, double q, double* ratio, int* within) {
  OTD_NOT_NULL(density);
  return guarded([&] {
    const otd::EquivalenceCheck c = otd::norm_equivalence_check(density->density, otd::LorentzParams(p, q));
    if (ratio) *ratio = c.ratio;
    if (within) *within = c.within ? 1 : 0;
  });
}

// ---- interpolation

otd_status otd_interpolate(const otd_solution* s, double t, otd_measure** out) {
  OTD_NOT_NULL(s, out);
  return guarded([&] { emit(out, otd::interpolate_plan(s->solution.plan, t)); });
}

otd_status otd_interpolant_density(const otd_density* source_density, const otd_solution* s, double t,
                                   const otd_grid* out_grid, otd_density** out) {
  OTD_NOT_NULL(source_density, s, out);
  return guarded([&] {
    const otd::AssignmentRegions regions = otd::AssignmentRegions::from_plan(s->solution.plan);
    std::optional<otd::Grid> grid;
    if (out_grid) grid = out_grid->grid;
    emit(out, otd::interpolant_density(source_density->density, regions, t, grid));
  });
}

// ---- experiments

otd_status otd_scenario_load(const char* path, otd_scenario** out) {
  OTD_NOT_NULL(path, out);
  return guarded([&] { emit(out, otd::Scenario::load(path), std::string()); });
}

otd_status otd_scenario_parse(const char* json_text, otd_scenario** out) {
  OTD_NOT_NULL(json_text, out);
  return guarded([&] { emit(out, otd::Scenario::from_json(json_text), std::string()); });
}

void otd_scenario_destroy(otd_scenario* scenario) { delete scenario; }

otd_status otd_scenario_set_seed(otd_scenario* scenario, uint64_t seed) {
  OTD_NOT_NULL(scenario);
  scenario->scenario.seed = seed;
  return OTD_OK;
}

otd_status otd_scenario_set_out_dir(otd_scenario* scenario, const char* dir) {
  OTD_NOT_NULL(scenario, dir);
  scenario->scenario.out_dir = dir;
  return OTD_OK;
}

const char* otd_scenario_json(otd_scenario* scenario) {
  if (!scenario) return "";
  scenario->json = scenario->scenario.to_json();
  return scenario->json.c_str();
}

otd_status otd_run(const otd_scenario* scenario, const char* experiment, int flags, otd_report** out) {
  OTD_NOT_NULL(scenario, experiment, out);
  return guarded([&] {
    otd::RunOptions options;
    options.timing = (flags & OTD_RUN_TIMING) != 0;
    options.write_files = (flags & OTD_RUN_NO_FILES) == 0;
    emit(out, otd::run_experiment(scenario->scenario, experiment, options), std::string());
  });
}

void otd_report_destroy(otd_report* report) { delete report; }
size_t otd_report_row_count(const otd_report* report) { return report ? report->report.rows.size() : 0; }
size_t otd_report_failures(const otd_report* report) { return report ? report->report.failures() : 0; }
size_t otd_report_file_count(const otd_report* report) { return report ? report->report.files.size() : 0; }

const char* otd_report_file(const otd_report* report, size_t index) {
  if (!report || index >= report->report.files.size()) return nullptr;
  return report->report.files[index].c_str();
}

otd_status otd_report_row(const otd_report* report, size_t index, otd_result_row* row) {
  OTD_NOT_NULL(report, row);
  return guarded([&] {
    otd::require(index < report->report.rows.size(), otd::ErrorCode::kInvalidArgument, "row index out of range");
    const otd::ResultRow& r = report->report.rows[index];
    *row = otd_result_row{r.scenario.c_str(), r.experiment.c_str(), r.parameters.c_str(), r.measured, r.bound,
                          r.ratio, r.pass ? 1 : 0, r.runtime};
  });
}

const char* otd_report_csv(otd_report* report) {
  if (!report) return "";
  report->csv = otd::rows_csv(report->report.rows);
  return report->csv.c_str();
}

}  // extern "C"
