#pragma once

#include "leakywire/fitting.hpp"
#include "leakywire/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace leakywire {

struct TestFunction {
  std::string name;
  std::function<double(double)> f;  // argument in [0, L]
  std::vector<double> kinks;        // points where f is not smooth
};

// one, cos1, sin1, cos2, hat_half (peak L/2, half-width L/4), hat_third (peak L/3, half-width L/6).
std::vector<TestFunction> test_dictionary(double length);
TestFunction test_function(const std::string& name, double length);

// (Q_lambda f)(s) from the closed form with the singular part written as
// (1/4pi) int (f(t) - f(s)) / p dt plus the diagonal log term.
double q_apply_direct(const Curve& curve, double lambda, const TestFunction& f, double s);

struct RegularizationRun {
  ComparisonFamily family;
  std::string function;
  double s = 0.0;
  std::vector<double> d;
  std::vector<double> values;  // with the (1/2pi) f(s) ln d counterterm
  std::vector<double> raw;     // without it
  Extrapolation limit;
  double jacobian_constant = 0.0;    // max over the grid of max_t |j_d - 1| / d
  double counterterm_slope = 0.0;    // b in raw ~ a + b ln d
  double counterterm_target = 0.0;   // -f(s)/2pi
  bool counterterm_ok = false;       // b within 5% of the target
};

// Per-d value of int G(|gamma(s) - gamma~_d(t)|) j_d(t) f(t) dt + f(s) ln d / 2pi, extrapolated to d = 0.
// d_grid must be decreasing, geometric, with at least four points.
RegularizationRun q_apply_via_family(const Curve& curve, double lambda, const ComparisonFamily& family,
                                     const TestFunction& f, double s, const std::vector<double>& d_grid);

// Default comparison grid: 8 points from 1e-2 to 1e-4 (scaled down for short or tightly curved curves).
std::vector<double> default_d_grid(const Curve& curve);

struct CosineExpansionReport {
  double max_residual = 0.0;     // max |r| with r = |gamma(s) - gamma~_d(t)|^2 - (s-t)^2 - d^2
  double c_quadratic = 0.0;      // coefficient of (s-t)^2 d
  double c_cubic = 0.0;          // coefficient of (s-t)^3 d
  double fit_residual = 0.0;     // ||r - model|| / ||r|| (0 when r vanishes)
  double iota_constant = 0.0;    // max |2 d (gamma(s) - gamma(t)) . n(t)| / ((s-t)^2 d)
  bool passed = false;
};

CosineExpansionReport cosine_expansion_check(const ComparisonFamily& family, const Curve& curve, double s,
                                             const std::vector<double>& d_grid);

struct RegcheckRow {
  FamilyKind family;
  std::string function;
  double s;
  double direct;
  RegularizationRun run;
  bool agrees;  // |limit - direct| <= limit error + direct error
};

struct RegcheckReport {
  std::vector<RegcheckRow> rows;
  double direct_error = 0.0;
  bool family_independent = true;  // |ParallelOffset - Recess| within summed errors
  bool all_agree = true;
  bool counterterms_ok = true;
};

RegcheckReport regcheck_suite(const Curve& curve, double lambda, const std::vector<double>& points,
                              const std::vector<double>& d_grid, double normal_sign = 1.0);

std::string to_string(FamilyKind kind);

}  // namespace leakywire
