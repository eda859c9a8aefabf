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

#include "svg_plot.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "csv_io.hpp"
#include "error.hpp"

namespace otd {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 55;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

std::string tick(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 1e-300) {
      const double pad = std::max(std::fabs(lo) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_svg(const Plot& plot) {
  Range xr, yr;
  for (const Series& s : plot.series) {
    require(s.x.size() == s.y.size(), ErrorCode::kInvalidArgument, "series x and y differ in length");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.title) << "</text>\n"
    << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << fixed(pw) << "\" height=\"" << fixed(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0, yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    o << "<line x1=\"" << fixed(sx(xv)) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(sx(xv)) << "\" y2=\""
      << fixed(kTop + ph + 5) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << tick(xv) << "</text>\n"
      << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(sy(yv)) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
      << fixed(sy(yv)) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(sy(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(plot.x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fixed(kTop + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const Series& ser = plot.series[s];
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      o << (first ? "" : " ") << fixed(sx(ser.x[i])) << ',' << fixed(sy(ser.y[i]));
      first = false;
    }
    o << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << fixed(kWidth - kRight + 12) << "\" y1=\"" << fixed(ly) << "\" x2=\""
      << fixed(kWidth - kRight + 32) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << fixed(kWidth - kRight + 36) << "\" y=\"" << fixed(ly + 4) << "\">" << escape(ser.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::string> emit_plots(const std::vector<Plot>& plots, const std::string& dir) {
  std::vector<std::string> paths;
  for (const Plot& p : plots) {
    std::string stem = p.file_stem;
    for (char& c : stem)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
    const std::string path = (std::filesystem::path(dir) / (stem + ".svg")).string();
    write_text_file(path, render_svg(p));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace otd
