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

#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace otd {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double v = 0.0;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(ErrorCode::kParse, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool is_blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string grid_header(const Grid& grid) {
  std::string h = "# grid d=" + std::to_string(grid.dim()) + " res=";
  for (int k = 0; k < grid.dim(); ++k) h += (k ? "," : "") + std::to_string(grid.res(k));
  h += " box=";
  for (int k = 0; k < grid.dim(); ++k) h += (k ? ";" : "") + format_double(grid.lo(k)) + "," + format_double(grid.hi(k));
  return h;
}

Grid parse_grid_header(const std::string& line) {
  std::istringstream in(line);
  std::string hash, tag;
  in >> hash >> tag;
  require(hash == "#" && tag == "grid", ErrorCode::kParse, "expected '# grid' header, got '" + line + "'");
  int dim = 0;
  std::vector<int> res;
  std::vector<double> lo, hi;
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    require(eq != std::string::npos, ErrorCode::kParse, "malformed grid header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    if (key == "d") {
      dim = static_cast<int>(parse_double(val));
    } else if (key == "res") {
      for (const auto& s : split(val, ',')) res.push_back(static_cast<int>(parse_double(s)));
    } else if (key == "box") {
      for (const auto& axis : split(val, ';')) {
        const auto ab = split(axis, ',');
        require(ab.size() == 2, ErrorCode::kParse, "box axis must be 'a,b'");
        lo.push_back(parse_double(ab[0]));
        hi.push_back(parse_double(ab[1]));
      }
    } else {
      fail(ErrorCode::kParse, "unknown grid header key '" + key + "'");
    }
  }
  require(dim >= 1 && res.size() == static_cast<std::size_t>(dim) && lo.size() == static_cast<std::size_t>(dim),
          ErrorCode::kParse, "grid header fields inconsistent with d=" + std::to_string(dim));
  return Grid(dim, lo, hi, res);
}

void write_density_csv(std::ostream& os, const GriddedDensity& f) {
  os << grid_header(f.grid) << '\n';
  for (double v : f.values) os << format_double(v) << '\n';
}

GriddedDensity read_density_csv(std::istream& is) {
  std::string line;
  while (std::getline(is, line) && is_blank(line)) {
  }
  const Grid grid = parse_grid_header(line);
  std::vector<double> values;
  values.reserve(grid.cell_count());
  while (std::getline(is, line)) {
    if (is_blank(line)) continue;
    values.push_back(parse_double(line));
  }
  return GriddedDensity(grid, std::move(values));
}

void write_density_csv(const std::string& path, const GriddedDensity& f) {
  auto out = open_out(path);
  write_density_csv(out, f);
}

GriddedDensity read_density_csv(const std::string& path) {
  auto in = open_in(path);
  return read_density_csv(in);
}

void write_vector_field_csv(std::ostream& os, const Grid& grid, const std::vector<std::array<double, kMaxDim>>& v) {
  os << grid_header(grid) << '\n';
  for (const auto& cell : v) {
    for (int k = 0; k < grid.dim(); ++k) os << (k ? "," : "") << format_double(cell[k]);
    os << '\n';
  }
}

void write_atoms_csv(std::ostream& os, const AtomicMeasure& m) {
  for (int k = 0; k < m.dim(); ++k) os << 'x' << (k + 1) << ',';
  os << "mass\n";
  for (const Atom& a : m.atoms()) {
    for (int k = 0; k < m.dim(); ++k) os << format_double(a.x[k]) << ',';
    os << format_double(a.mass) << '\n';
  }
}

AtomicMeasure read_atoms_csv(std::istream& is, int dim) {
  std::vector<Atom> atoms;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (is_blank(line) || line[0] == '#') continue;
    const auto cols = split(line, ',');
    if (first) {
      first = false;
      const auto c0 = cols.empty() ? std::string() : cols[0];
      if (c0.find_first_of("0123456789") == std::string::npos || c0.find_first_of("xX") != std::string::npos) continue;
    }
    require(cols.size() == static_cast<std::size_t>(dim) + 1, ErrorCode::kParse,
            "atom line needs " + std::to_string(dim + 1) + " columns: '" + line + "'");
    Atom a;
    for (int k = 0; k < dim; ++k) a.x[k] = parse_double(cols[k]);
    a.mass = parse_double(cols[dim]);
    atoms.push_back(a);
  }
  return AtomicMeasure(dim, std::move(atoms));
}

void write_atoms_csv(const std::string& path, const AtomicMeasure& m) {
  auto out = open_out(path);
  write_atoms_csv(out, m);
}

AtomicMeasure read_atoms_csv(const std::string& path, int dim) {
  auto in = open_in(path);
  return read_atoms_csv(in, dim);
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIo, "failed writing '" + path + "'");
}

}  // namespace otd
