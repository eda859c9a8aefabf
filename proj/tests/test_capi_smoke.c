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

/* The public header compiles as C and the library links from a C program. */
#include <math.h>
#include <stdio.h>

#include "otdensity/otdensity.h"

int main(void) {
  const double x[] = {0.0}, y[] = {1.0}, m[] = {1.0};
  otd_measure* mu = NULL;
  otd_measure* nu = NULL;
  otd_solution* sol = NULL;
  otd_grid* grid = NULL;
  otd_density* sigma = NULL;
  double norm = 0.0;
  int failures = 0;

  if (otd_measure_create(1, x, m, 1, &mu) != OTD_OK || otd_measure_create(1, y, m, 1, &nu) != OTD_OK) return 1;
  if (otd_solve(mu, nu, 0.0, &sol) != OTD_OK) return 1;
  if (fabs(otd_solution_cost(sol) - 1.0) > 1e-12) ++failures;
  if (otd_grid_create_unit(1, 4, &grid) != OTD_OK) return 1;
  if (otd_rasterize_sigma(sol, grid, &sigma) != OTD_OK) return 1;
  if (otd_lorentz_norm(sigma, 2.0, INFINITY, &norm) != OTD_OK) return 1;
  if (fabs(norm - 1.0) > 1e-12) ++failures; /* sigma = 1 on [0,1] */

  otd_density_destroy(sigma);
  otd_grid_destroy(grid);
  otd_solution_destroy(sol);
  otd_measure_destroy(nu);
  otd_measure_destroy(mu);
  printf("c smoke: %s\n", failures == 0 ? "ok" : "FAILED");
  return failures;
}
