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

#include "scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "csv_io.hpp"
#include "error.hpp"
#include "json.hpp"

namespace otd {

namespace {

using nlohmann::json;

std::string resolve(const std::string& base, const std::string& file) {
  if (file.empty() || base.empty() || std::filesystem::path(file).is_absolute()) return file;
  return (std::filesystem::path(base) / file).string();
}

double as_exponent(const json& v, bool allow_p = false) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (allow_p && s == "p") return Scenario::kQEqualsP;
    if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
    fail(ErrorCode::kParse, "exponent must be a number or \"inf\", got \"" + s + "\"");
  }
  return v.get<double>();
}

json exponent_json(double x) {
  if (x == Scenario::kQEqualsP) return json("p");
  return std::isinf(x) ? json("inf") : json(x);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

DensitySpec read_spec(const json& j, const std::string& prefix) {
  DensitySpec s;
  s.type = j.value(prefix + "_type", std::string("uniform_box"));
  read(j, (prefix + "_lo").c_str(), s.lo);
  read(j, (prefix + "_hi").c_str(), s.hi);
  read(j, (prefix + "_center").c_str(), s.center);
  read(j, (prefix + "_beta").c_str(), s.beta);
  read(j, (prefix + "_file").c_str(), s.file);
  return s;
}

void write_spec(json& j, const std::string& prefix, const DensitySpec& s) {
  j[prefix + "_type"] = s.type;
  if (s.type == "uniform_box") {
    j[prefix + "_lo"] = s.lo;
    j[prefix + "_hi"] = s.hi;
  } else if (s.type == "power_spike") {
    j[prefix + "_center"] = s.center;
    j[prefix + "_beta"] = s.beta;
  } else {
    j[prefix + "_file"] = s.file;
  }
}

void check_spec(const DensitySpec& s, int dim, const std::string& what, const std::string& base) {
  if (s.type == "uniform_box") {
    require(static_cast<int>(s.lo.size()) == dim && static_cast<int>(s.hi.size()) == dim, ErrorCode::kInvalidArgument,
            what + " box corners need " + std::to_string(dim) + " coordinates");
    for (int k = 0; k < dim; ++k)
      require(s.hi[k] > s.lo[k], ErrorCode::kInvalidArgument, what + " box is empty");
  } else if (s.type == "power_spike") {
    require(static_cast<int>(s.center.size()) == dim, ErrorCode::kInvalidArgument,
            what + " spike center needs " + std::to_string(dim) + " coordinates");
    require(s.beta >= 0.0 && s.beta < dim, ErrorCode::kInvalidArgument, what + " spike exponent must lie in [0, d)");
  } else if (s.type == "file") {
    require(std::filesystem::exists(resolve(base, s.file)), ErrorCode::kIo, what + " file not found: " + s.file);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown " + what + " type '" + s.type + "'");
  }
}

}  // namespace

GriddedDensity make_density(const DensitySpec& spec, const Grid& grid, const std::string& base_dir) {
  GriddedDensity f(grid);
  const int dim = grid.dim();
  if (spec.type == "file") {
    f = read_density_csv(resolve(base_dir, spec.file));
    require(f.grid == grid, ErrorCode::kMismatch, "density file grid differs from the scenario grid");
  } else if (spec.type == "uniform_box") {
    Point lo{}, hi{};
    for (int k = 0; k < dim; ++k) {
      lo[k] = spec.lo[k];
      hi[k] = spec.hi[k];
    }
    deposit_box(f, lo, hi, 1.0);
  } else if (spec.type == "power_spike") {
    // |x - x0|^-beta sampled at cell centers, radius clipped at half a cell
    double h = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) h = std::min(h, grid.spacing(k));
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      Point x0{};
      for (int k = 0; k < dim; ++k) x0[k] = spec.center[k];
      const double r = std::max(distance(grid.cell_center(c), x0, dim), 0.5 * h);
      f.values[c] = std::pow(r, -spec.beta);
    }
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown density type '" + spec.type + "'");
  }
  const double mass = total_mass(f);
  require(mass > 0.0, ErrorCode::kEmptyMeasure, "empty measure: density has no mass on the grid");
  for (double& v : f.values) v /= mass;
  return f;
}

Grid Scenario::grid(int res) const {
  std::vector<int> r(dim, res);
  return Grid(dim, domain_lo, domain_hi, r);
}

GriddedDensity Scenario::source_density(int res) const { return make_density(source, grid(res), base_dir); }

GriddedDensity Scenario::target_as_density(int res) const {
  require(target_type == "density", ErrorCode::kUnsupported, "target is atomic, not a density");
  return make_density(target_density, grid(res), base_dir);
}

AtomicMeasure Scenario::target_measure(int res) const {
  if (target_type == "density") return discretize_density(target_as_density(res));
  AtomicMeasure m = target_type == "atoms_file" ? read_atoms_csv(resolve(base_dir, target_file), dim)
                                                : AtomicMeasure(dim, target_atoms);
  const double mass = total_mass(m);
  require(mass > 0.0, ErrorCode::kEmptyMeasure, "empty measure: no target atoms");
  std::vector<Atom> atoms = m.atoms();
  for (Atom& a : atoms) a.mass /= mass;
  return AtomicMeasure(dim, std::move(atoms));
}

void Scenario::validate() const {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::kInvalidArgument, "dim must be 1, 2 or 3");
  require(static_cast<int>(domain_lo.size()) == dim && static_cast<int>(domain_hi.size()) == dim,
          ErrorCode::kInvalidArgument, "domain corners need dim coordinates");
  for (int k = 0; k < dim; ++k)
    require(domain_hi[k] > domain_lo[k], ErrorCode::kInvalidArgument, "domain box is empty");
  check_spec(source, dim, "source", base_dir);
  if (target_type == "density") {
    check_spec(target_density, dim, "target", base_dir);
  } else if (target_type == "atoms") {
    require(!target_atoms.empty(), ErrorCode::kEmptyMeasure, "empty measure: no target atoms");
    const Grid box = grid(1);
    for (const Atom& a : target_atoms)
      require(box.contains(a.x), ErrorCode::kOutOfDomain, "target atom outside the domain");
  } else if (target_type == "atoms_file") {
    require(std::filesystem::exists(resolve(base_dir, target_file)), ErrorCode::kIo,
            "target file not found: " + target_file);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown target type '" + target_type + "'");
  }
  require(!resolutions.empty(), ErrorCode::kInvalidArgument, "resolutions must be nonempty");
  for (int r : resolutions) require(r >= 1, ErrorCode::kInvalidArgument, "resolutions must be >= 1");
  for (int n : projection_n) require(n >= 1, ErrorCode::kInvalidArgument, "projection_n must be >= 1");
  for (double e : eps) require(e >= 0.0 && std::isfinite(e), ErrorCode::kInvalidArgument, "eps must be >= 0");
  for (double v : p) require(v > 1.0 && std::isfinite(v), ErrorCode::kInvalidArgument, "p must lie in (1, inf)");
  for (double v : q) require(v >= 1.0 || v == kQEqualsP, ErrorCode::kInvalidArgument, "q must lie in [1, inf]");
  for (double t : t_samples) require(t >= 0.0 && t <= 1.0, ErrorCode::kInvalidArgument, "t must lie in [0, 1]");
  require(quad_nodes >= 8, ErrorCode::kInvalidArgument, "quad_nodes must be >= 8");
  require(c_fit > 0.0, ErrorCode::kInvalidArgument, "c_fit must be positive");
  require(tol.binning >= 0 && tol.mc_sigmas > 0 && tol.exact >= 0 && tol.stability >= 0,
          ErrorCode::kInvalidArgument, "tolerances must be nonnegative");
}

std::string Scenario::to_json() const {
  json j;
  j["name"] = name;
  j["dim"] = dim;
  j["domain_lo"] = domain_lo;
  j["domain_hi"] = domain_hi;
  write_spec(j, "source", source);
  if (target_type != "density") j["target_type"] = target_type;
  if (target_type == "atoms") {
    json atoms = json::array();
    for (const Atom& a : target_atoms) {
      json row = json::array();
      for (int k = 0; k < dim; ++k) row.push_back(a.x[k]);
      row.push_back(a.mass);
      atoms.push_back(row);
    }
    j["target_atoms"] = atoms;
  } else if (target_type == "atoms_file") {
    j["target_file"] = target_file;
  } else {
    write_spec(j, "target", target_density);
  }
  j["resolutions"] = resolutions;
  j["projection_n"] = projection_n;
  j["eps"] = eps;
  json pj = json::array(), qj = json::array();
  for (double v : p) pj.push_back(exponent_json(v));
  for (double v : q) qj.push_back(exponent_json(v));
  j["p"] = pj;
  j["q"] = qj;
  j["t_samples"] = t_samples;
  j["quad_nodes"] = quad_nodes;
  j["mc_samples"] = mc_samples;
  j["seed"] = seed;
  j["c_fit"] = c_fit;
  j["tol_binning"] = tol.binning;
  j["tol_mc_sigmas"] = tol.mc_sigmas;
  j["tol_exact"] = tol.exact;
  j["tol_stability"] = tol.stability;
  j["out_dir"] = out_dir;
  return j.dump(2) + "\n";
}

Scenario Scenario::from_json(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid scenario JSON: ") + e.what());
  }
  require(j.is_object(), ErrorCode::kParse, "scenario must be a JSON object");
  Scenario s;
  s.base_dir = base_dir;
  try {
    read(j, "name", s.name);
    read(j, "dim", s.dim);
    s.domain_lo.assign(s.dim, 0.0);
    s.domain_hi.assign(s.dim, 1.0);
    read(j, "domain_lo", s.domain_lo);
    read(j, "domain_hi", s.domain_hi);
    s.source = read_spec(j, "source");
    read(j, "target_type", s.target_type);
    if (s.target_type != "atoms" && s.target_type != "atoms_file") {
      s.target_density = read_spec(j, "target");
      s.target_type = "density";
    }
    if (j.contains("target_atoms")) {
      for (const auto& row : j.at("target_atoms")) {
        require(row.is_array() && static_cast<int>(row.size()) == s.dim + 1, ErrorCode::kParse,
                "each target atom is [x1, ..., xd, mass]");
        Atom a;
        for (int k = 0; k < s.dim; ++k) a.x[k] = row[k].get<double>();
        a.mass = row[s.dim].get<double>();
        s.target_atoms.push_back(a);
      }
    }
    read(j, "target_file", s.target_file);
    read(j, "resolutions", s.resolutions);
    read(j, "projection_n", s.projection_n);
    read(j, "eps", s.eps);
    if (j.contains("p")) {
      s.p.clear();
      for (const auto& v : j.at("p")) s.p.push_back(as_exponent(v));
    }
    if (j.contains("q")) {
      s.q.clear();
      for (const auto& v : j.at("q")) s.q.push_back(as_exponent(v, true));
    }
    read(j, "t_samples", s.t_samples);
    read(j, "quad_nodes", s.quad_nodes);
    read(j, "mc_samples", s.mc_samples);
    read(j, "seed", s.seed);
    read(j, "c_fit", s.c_fit);
    read(j, "tol_binning", s.tol.binning);
    read(j, "tol_mc_sigmas", s.tol.mc_sigmas);
    read(j, "tol_exact", s.tol.exact);
    read(j, "tol_stability", s.tol.stability);
    read(j, "out_dir", s.out_dir);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad scenario field: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace otd
