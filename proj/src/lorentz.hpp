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

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "geometry.hpp"

namespace otd {

/// Exponents of L^{p,q}: p in (1, inf), q in [1, inf]. q = inf selects the weak-type
/// (supremum) formulas.
class LorentzParams {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  LorentzParams(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }
  bool q_infinite() const { return std::isinf(q_); }
  /// p' = p / (p - 1)
  double p_conjugate() const { return p_conj_; }
  /// d / p', the homothety exponent in dimension d
  double dilation_exponent(int dim) const { return dim / p_conj_; }

 private:
  double p_;
  double q_;
  double p_conj_;
};

/// Nonincreasing step function on (0, inf) with finitely many jumps, vanishing at infinity.
/// levels[0] applies before breakpoints[0], levels[k] between breakpoints[k-1] and
/// breakpoints[k], and levels.back() == 0 after the last breakpoint. Right-continuous
/// profiles take the new level at a breakpoint, left-continuous ones the old.
struct StepProfile {
  enum class Continuity { kRight, kLeft };

  std::vector<double> breakpoints;
  std::vector<double> levels{0.0};
  Continuity continuity = Continuity::kRight;

  double operator()(double t) const;
  /// integral over (0, inf)
  double integral() const;
};

/// lambda(t) = |{|f| >= t}|, left-continuous.
StepProfile distribution_function(const GriddedDensity& f);

/// f*(s) = inf{a : |{|f| > a}| <= s}, right-continuous.
StepProfile decreasing_rearrangement(const GriddedDensity& f);

/// Closed-form Lorentz quasinorm p^{1/q} || t lambda(t)^{1/p} ||_{L^q(dt/t)} from the
/// distribution function; sup_t t lambda(t)^{1/p} when q = inf.
double lorentz_quasinorm(const StepProfile& distribution, const LorentzParams& params);
double lorentz_quasinorm(const GriddedDensity& f, const LorentzParams& params);

/// The same quantity from the rearrangement: || s^{1/p} f*(s) ||_{L^q(ds/s)}.
double lorentz_quasinorm_from_rearrangement(const StepProfile& rearrangement, const LorentzParams& params);

/// f**(t) = (1/t) int_0^t f*(s) ds
double maximal_function(const StepProfile& rearrangement, double t);

/// || t^{1/p} f**(t) ||_{L^q(dt/t)}. f** is a + b/t between jumps of f*; interior
/// pieces are integrated by adaptive Gauss-Kronrod, the first piece and the M/t
/// tail in closed form. q = inf takes the maximum over jump points.
double maximal_quasinorm(const StepProfile& rearrangement, const LorentzParams& params);
double maximal_quasinorm(const GriddedDensity& f, const LorentzParams& params);

struct EquivalenceCheck {
  double ratio;
  bool within;
};

/// ratio = maximal / Lorentz quasinorm, within = ratio in [1, p/(p-1)] up to 1e-8.
EquivalenceCheck norm_equivalence_check(const GriddedDensity& f, const LorentzParams& params);

/// (sum |f|^p |c|)^{1/p}
double lp_norm(const GriddedDensity& f, double p);

}  // namespace otd
