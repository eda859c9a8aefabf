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

#ifndef OTDENSITY_OTDENSITY_H
#define OTDENSITY_OTDENSITY_H

/*
 * C interface to the otdensity library: exact discrete optimal transport,
 * transport densities, displacement interpolation, Lorentz norms, brute-force
 * oracles and the experiment runner.
 *
 * Conventions
 *   - Every fallible call returns an otd_status; OTD_OK is 0. On failure the
 *     message for the calling thread is available from otd_last_error().
 *   - Objects are opaque handles created by otd_*_create / otd_*_load style
 *     functions and released with the matching otd_*_destroy (NULL is accepted).
 *   - Points are passed as flat arrays of n * dim doubles, row-major.
 *   - q = INFINITY (from <math.h>) selects the weak-type Lorentz formulas.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OTD_BUILDING_LIBRARY)
#    define OTD_API __declspec(dllexport)
#  else
#    define OTD_API __declspec(dllimport)
#  endif
#else
#  define OTD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otd_status {
  OTD_OK = 0,
  OTD_ERR_INVALID_ARGUMENT = 1,
  OTD_ERR_EMPTY_MEASURE = 2,
  OTD_ERR_MASS_IMBALANCE = 3,
  OTD_ERR_OUT_OF_DOMAIN = 4,
  OTD_ERR_MISMATCH = 5,
  OTD_ERR_UNSUPPORTED = 6,
  OTD_ERR_SIZE_CAP = 7,
  OTD_ERR_IO = 8,
  OTD_ERR_PARSE = 9,
  OTD_ERR_INTERNAL = 10,
  OTD_ERR_NULL_ARGUMENT = 11
} otd_status;

typedef struct otd_grid otd_grid;
typedef struct otd_density otd_density;
typedef struct otd_measure otd_measure;
typedef struct otd_solution otd_solution;
typedef struct otd_field otd_field;
typedef struct otd_scenario otd_scenario;
typedef struct otd_report otd_report;

/* ---- library ---------------------------------------------------------- */

OTD_API const char* otd_version(void);
/* Message of the last failed call on this thread ("" if none). */
OTD_API const char* otd_last_error(void);
OTD_API const char* otd_status_string(otd_status status);
/* Worker threads for rasterization and parameter sweeps (>= 1). Results do not depend on it. */
OTD_API otd_status otd_set_threads(int threads);
OTD_API int otd_get_threads(void);

/* ---- grids ------------------------------------------------------------ */

OTD_API otd_status otd_grid_create(int dim, const double* lo, const double* hi, const int* res, otd_grid** out);
/* [0,1]^dim with n cells per axis. */
OTD_API otd_status otd_grid_create_unit(int dim, int n, otd_grid** out);
OTD_API void otd_grid_destroy(otd_grid* grid);
OTD_API int otd_grid_dim(const otd_grid* grid);
OTD_API size_t otd_grid_cell_count(const otd_grid* grid);
OTD_API double otd_grid_cell_volume(const otd_grid* grid);

/* ---- gridded densities ------------------------------------------------ */

/* values: one nonnegative entry per cell, row-major with the last axis fastest. */
OTD_API otd_status otd_density_create(const otd_grid* grid, const double* values, size_t count, otd_density** out);
OTD_API otd_status otd_density_read_csv(const char* path, otd_density** out);
OTD_API otd_status otd_density_write_csv(const otd_density* density, const char* path);
OTD_API void otd_density_destroy(otd_density* density);
/* Borrowed view valid until the density is destroyed. */
OTD_API otd_status otd_density_values(const otd_density* density, const double** values, size_t* count);
OTD_API otd_status otd_density_grid(const otd_density* density, otd_grid** out);
OTD_API double otd_density_mass(const otd_density* density);

/* ---- atomic measures -------------------------------------------------- */

OTD_API otd_status otd_measure_create(int dim, const double* points, const double* masses, size_t count,
                                      otd_measure** out);
/* One atom per positive cell, at the cell center. */
OTD_API otd_status otd_measure_from_density(const otd_density* density, otd_measure** out);
/* Pushforward under the nearest node of (1/n)Z^d inside the grid's box. */
OTD_API otd_status otd_measure_project(const otd_measure* measure, int n, const otd_grid* box, otd_measure** out);
OTD_API otd_status otd_measure_read_csv(const char* path, int dim, otd_measure** out);
OTD_API otd_status otd_measure_write_csv(const otd_measure* measure, const char* path);
OTD_API void otd_measure_destroy(otd_measure* measure);
OTD_API size_t otd_measure_size(const otd_measure* measure);
OTD_API int otd_measure_dim(const otd_measure* measure);
/* point receives dim coordinates. */
OTD_API otd_status otd_measure_atom(const otd_measure* measure, size_t index, double* point, double* mass);
OTD_API double otd_measure_mass(const otd_measure* measure);

/* ---- exact transport -------------------------------------------------- */

/* Optimal plan and potentials for the cost |x - y|^(1 + eps). */
OTD_API otd_status otd_solve(const otd_measure* source, const otd_measure* target, double eps, otd_solution** out);
OTD_API void otd_solution_destroy(otd_solution* solution);
OTD_API double otd_solution_cost(const otd_solution* solution);
OTD_API double otd_solution_cost_exponent(const otd_solution* solution);
/* primal - dual */
OTD_API double otd_solution_duality_gap(const otd_solution* solution);
OTD_API double otd_solution_marginal_violation(const otd_solution* solution);
OTD_API size_t otd_solution_entry_count(const otd_solution* solution);
OTD_API otd_status otd_solution_entry(const otd_solution* solution, size_t k, size_t* source, size_t* target,
                                      double* mass);
/* Borrowed views of u (per source atom) and w (per target atom). */
OTD_API otd_status otd_solution_potentials(const otd_solution* solution, const double** u, size_t* u_count,
                                           const double** w, size_t* w_count);
/* Largest |u_a - u_b| - |x_a - x_b| over source pairs, floored at 0; eps = 0 only. */
OTD_API otd_status otd_solution_lip1_violation(const otd_solution* solution, double* violation);
/* CSV `i,j,mass,cost_ij` and `side,index,value`; either path may be NULL. */
OTD_API otd_status otd_solution_write_csv(const otd_solution* solution, const char* plan_path,
                                          const char* duals_path);
/* Brute-force assignment over all permutations (at most 8 equal-mass atoms per side).
   permutation (may be NULL) receives target indices for each source atom. */
OTD_API otd_status otd_brute_transport(const otd_measure* source, const otd_measure* target, double eps,
                                       double* cost, size_t* permutation);

/* ---- transport density ------------------------------------------------ */

OTD_API otd_status otd_rasterize_sigma(const otd_solution* solution, const otd_grid* grid, otd_density** out);
OTD_API otd_status otd_rasterize_flow(const otd_solution* solution, const otd_grid* grid, otd_field** out);
OTD_API void otd_field_destroy(otd_field* field);
/* vector receives dim components. */
OTD_API otd_status otd_field_vector(const otd_field* field, size_t cell, double* vector);
OTD_API otd_status otd_field_write_csv(const otd_field* field, const char* path);
/* Monte Carlo estimate of sigma with per-cell standard errors summed into l1_std_error. */
OTD_API otd_status otd_mc_sigma(const otd_solution* solution, const otd_grid* grid, uint64_t samples,
                                uint64_t seed, otd_density** out, double* l1_std_error);
OTD_API otd_status otd_l1_distance(const otd_density* a, const otd_density* b, double* out);

/* ---- Lorentz norms ---------------------------------------------------- */

OTD_API otd_status otd_lorentz_norm(const otd_density* density, double p, double q, double* out);
OTD_API otd_status otd_maximal_norm(const otd_density* density, double p, double q, double* out);
/* ratio = maximal / Lorentz norm; within = 1 iff ratio lies in [1, p/(p-1)] up to 1e-8. */
OTD_API otd_status otd_norm_equivalence(const otd_density* density, double p, double q, double* ratio,
                                        int* within);

/* ---- interpolation ---------------------------------------------------- */

/* mu_t: one atom per plan entry at (1-t)x + ty. */
OTD_API otd_status otd_interpolate(const otd_solution* solution, double t, otd_measure** out);
/* Homothety density of the interpolant; the solution's source must be the
   discretization of source_density. out_grid may be NULL (source grid). */
OTD_API otd_status otd_interpolant_density(const otd_density* source_density, const otd_solution* solution,
                                           double t, const otd_grid* out_grid, otd_density** out);

/* ---- experiments ------------------------------------------------------ */

typedef struct otd_result_row {
  const char* scenario;
  const char* experiment;
  const char* parameters;
  double measured;
  double bound;
  double ratio;
  int pass;
  double runtime; /* NaN unless timing was requested */
} otd_result_row;

enum { OTD_RUN_TIMING = 1, OTD_RUN_NO_FILES = 2 };

OTD_API otd_status otd_scenario_load(const char* path, otd_scenario** out);
OTD_API otd_status otd_scenario_parse(const char* json_text, otd_scenario** out);
OTD_API void otd_scenario_destroy(otd_scenario* scenario);
OTD_API otd_status otd_scenario_set_seed(otd_scenario* scenario, uint64_t seed);
OTD_API otd_status otd_scenario_set_out_dir(otd_scenario* scenario, const char* dir);
/* Resolved JSON with every default filled in; borrowed until the next call on this scenario. */
OTD_API const char* otd_scenario_json(otd_scenario* scenario);

/* experiment: solve, sigma, lorentz, interp, prop21, prop23, prop25 or oracle. */
OTD_API otd_status otd_run(const otd_scenario* scenario, const char* experiment, int flags, otd_report** out);
OTD_API void otd_report_destroy(otd_report* report);
OTD_API size_t otd_report_row_count(const otd_report* report);
/* Strings in row are borrowed from the report. */
OTD_API otd_status otd_report_row(const otd_report* report, size_t index, otd_result_row* row);
OTD_API size_t otd_report_failures(const otd_report* report);
OTD_API size_t otd_report_file_count(const otd_report* report);
OTD_API const char* otd_report_file(const otd_report* report, size_t index);
/* The results table as CSV text; borrowed from the report. */
OTD_API const char* otd_report_csv(otd_report* report);

#ifdef __cplusplus
}
#endif

#endif /* OTDENSITY_OTDENSITY_H */
