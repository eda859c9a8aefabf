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

#include "lorentz.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <functional>

#include "error.hpp"

namespace otd {

namespace {

constexpr double kQuadratureTolerance = 1e-12;
constexpr unsigned kQuadratureDepth = 20;
constexpr double kEquivalenceSlack = 1e-8;

// Distinct positive cell values with the number of cells carrying each, descending.
std::vector<std::pair<double, std::size_t>> value_counts_descending(const GriddedDensity& f) {
  std::vector<double> v;
  v.reserve(f.values.size());
  for (double x : f.values)
    if (x > 0.0) v.push_back(x);
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<std::pair<double, std::size_t>> out;
  for (double x : v) {
    if (!out.empty() && out.back().first == x)
      ++out.back().second;
    else
      out.emplace_back(x, 1);
  }
  return out;
}

}  // namespace

LorentzParams::LorentzParams(double p, double q) : p_(p), q_(q) {
  require(std::isfinite(p) && p > 1.0, ErrorCode::kInvalidArgument, "Lorentz exponent p must lie in (1, inf)");
  require(!std::isnan(q) && q >= 1.0, ErrorCode::kInvalidArgument, "Lorentz exponent q must lie in [1, inf]");
  p_conj_ = p / (p - 1.0);
}

double StepProfile::operator()(double t) const {
  const auto it = continuity == Continuity::kRight ? std::upper_bound(breakpoints.begin(), breakpoints.end(), t)
                                                   : std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
  return levels[static_cast<std::size_t>(it - breakpoints.begin())];
}

double StepProfile::integral() const {
  double s = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    s += levels[k] * (breakpoints[k] - prev);
    prev = breakpoints[k];
  }
  return s;
}

StepProfile distribution_function(const GriddedDensity& f) {
  const auto counts = value_counts_descending(f);
  const double vol = f.grid.cell_volume();
  StepProfile lambda;
  lambda.continuity = StepProfile::Continuity::kLeft;
  lambda.levels.clear();
  // on (v_{k-1}, v_k] the level is the volume of cells with value >= v_k
  std::vector<double> at_least(counts.size());
  std::size_t running = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    running += counts[k].second;
    at_least[k] = static_cast<double>(running) * vol;
  }
  for (std::size_t k = counts.size(); k-- > 0;) {
    lambda.breakpoints.push_back(counts[k].first);
    lambda.levels.push_back(at_least[k]);
  }
  lambda.levels.push_back(0.0);
  return lambda;
}

StepProfile decreasing_rearrangement(const GriddedDensity& f) {
  const auto counts = value_counts_descending(f);
  const double vol = f.grid.cell_volume();
  StepProfile star;
  star.continuity = StepProfile::Continuity::kRight;
  star.levels.clear();
  std::size_t running = 0;
  for (const auto& [value, count] : counts) {
    running += count;
    star.levels.push_back(value);
    star.breakpoints.push_back(static_cast<double>(running) * vol);
  }
  star.levels.push_back(0.0);
  return star;
}

double lorentz_quasinorm(const StepProfile& distribution, const LorentzParams& params) {
  const double p = params.p();
  const auto& t = distribution.breakpoints;
  const auto& lam = distribution.levels;
  if (params.q_infinite()) {
    double sup = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) sup = std::max(sup, t[k] * std::pow(lam[k], 1.0 / p));
    return sup;
  }
  const double q = params.q();
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double tq = std::pow(t[k], q);
    acc += (tq - prev) / q * std::pow(lam[k], q / p);
    prev = tq;
  }
  return std::pow(p * acc, 1.0 / q);
}

double lorentz_quasinorm(const GriddedDensity& f, const LorentzParams& params) {
  return lorentz_quasinorm(distribution_function(f), params);
}

double lorentz_quasinorm_from_rearrangement(const StepProfile& rearrangement, const LorentzParams& params) {
  const double p = params.p();
  const auto& b = rearrangement.breakpoints;
  const auto& w = rearrangement.levels;
  if (params.q_infinite()) {
    double sup = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) sup = std::max(sup, w[k] * std::pow(b[k], 1.0 / p));
    return sup;
  }
  const double q = params.q();
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double bq = std::pow(b[k], q / p);
    acc += std::pow(w[k], q) * (p / q) * (bq - prev);
    prev = bq;
  }
  return std::pow(acc, 1.0 / q);
}

double maximal_function(const StepProfile& rearrangement, double t) {
  require(t > 0.0, ErrorCode::kInvalidArgument, "maximal function needs t > 0");
  double integral = 0.0;
  double prev = 0.0;
  const auto& b = rearrangement.breakpoints;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (t <= b[k]) return (integral + rearrangement.levels[k] * (t - prev)) / t;
    integral += rearrangement.levels[k] * (b[k] - prev);
    prev = b[k];
  }
  return integral / t;
}

double maximal_quasinorm(const StepProfile& rearrangement, const LorentzParams& params) {
  const auto& b = rearrangement.breakpoints;
  const auto& w = rearrangement.levels;
  if (b.empty()) return 0.0;
  const double p = params.p();
  const std::size_t m = b.size();

  // running integrals C_k = int_0^{b_k} f*
  std::vector<double> running(m);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    acc += w[k] * (b[k] - prev);
    running[k] = acc;
    prev = b[k];
  }

  if (params.q_infinite()) {
    // t^{1/p}(a + b/t) has no interior maximum, so the sup sits at a jump of f*
    double sup = 0.0;
    for (std::size_t k = 0; k < m; ++k) sup = std::max(sup, std::pow(b[k], 1.0 / p) * running[k] / b[k]);
    return sup;
  }

  const double q = params.q();
  // first piece: f** = w_0 on (0, b_0]
  double total = std::pow(w[0], q) * (p / q) * std::pow(b[0], q / p);
  // interior pieces: f** = a + c/t on [b_{k-1}, b_k], integrated in s = log t
  for (std::size_t k = 1; k < m; ++k) {
    const double a = w[k];
    const double c = running[k - 1] - w[k] * b[k - 1];
    auto integrand = [a, c, p, q](double s) {
      const double t = std::exp(s);
      return std::pow(t, q / p) * std::pow(a + c / t, q);
    };
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, std::log(b[k - 1]), std::log(b[k]), kQuadratureDepth, kQuadratureTolerance);
  }
  // tail: f** = C/t on [b_m, inf)
  const double tail_exp = q / p - q;
  total += std::pow(running[m - 1], q) * std::pow(b[m - 1], tail_exp) / (-tail_exp);
  return std::pow(total, 1.0 / q);
}

double maximal_quasinorm(const GriddedDensity& f, const LorentzParams& params) {
  return maximal_quasinorm(decreasing_rearrangement(f), params);
}

EquivalenceCheck norm_equivalence_check(const GriddedDensity& f, const LorentzParams& params) {
  const double base = lorentz_quasinorm(f, params);
  require(base > 0.0, ErrorCode::kInvalidArgument, "ratio undefined for the zero density");
  const double ratio = maximal_quasinorm(f, params) / base;
  const double upper = params.p() / (params.p() - 1.0);
  return {ratio, ratio >= 1.0 - kEquivalenceSlack && ratio <= upper + kEquivalenceSlack};
}

double lp_norm(const GriddedDensity& f, double p) {
  double s = 0.0;
  for (double v : f.values) s += std::pow(std::fabs(v), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace otd
