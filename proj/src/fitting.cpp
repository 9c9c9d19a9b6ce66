#include "leakywire/fitting.hpp"

#include "leakywire/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace leakywire {

LeastSquaresFit least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  if (A.rows() != y.size()) throw ConfigError("least_squares: dimension mismatch");
  if (A.rows() < A.cols()) throw FitError("least_squares: fewer samples than unknowns");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LeastSquaresFit fit;
  const auto& sv = svd.singularValues();
  fit.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  fit.coeffs = svd.solve(y);
  fit.residual = (A * fit.coeffs - y).norm();
  return fit;
}

namespace {

double model_limit(const std::vector<double>& d, const std::vector<double>& v, std::size_t begin, int terms) {
  std::size_t n = d.size() - begin;
  Eigen::MatrixXd A(n, terms);
  Eigen::VectorXd y(n);
  // Columns scaled by the largest d so the system stays well conditioned.
  double scale = *std::max_element(d.begin() + begin, d.end());
  for (std::size_t i = 0; i < n; ++i) {
    double x = d[begin + i] / scale;
    A(i, 0) = 1.0;
    A(i, 1) = x;
    A(i, 2) = x * std::log(x);
    if (terms == 5) {
      A(i, 3) = x * x;
      A(i, 4) = x * x * std::log(x);
    }
    y(i) = v[begin + i];
  }
  return least_squares(A, y).coeffs(0);
}

}  // namespace

Extrapolation extrapolate_to_zero(const std::vector<double>& d, const std::vector<double>& values) {
  if (d.size() != values.size() || d.size() < 2) throw ConfigError("extrapolation needs at least two samples");
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  std::vector<double> ds, vs;
  for (auto i : idx) {
    ds.push_back(d[i]);
    vs.push_back(values[i]);
  }
  const std::size_t n = ds.size();
  Extrapolation ex;
  // The finest increment must have decayed against the largest earlier one; constant
  // increments (logarithmic divergence) or growth at the fine end fail.
  if (n >= 3) {
    double largest = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) largest = std::max(largest, std::abs(vs[i] - vs[i - 1]));
    double last = std::abs(vs[n - 1] - vs[n - 2]);
    double floor = 1e-13 * std::max(1.0, std::abs(vs.back()));
    if (last > floor && last > 0.75 * largest) ex.converged = false;
  }
  if (!ex.converged) {
    ex.value = vs.back();
    ex.error = 4.0 * std::abs(vs[n - 1] - vs[n - 2]) + 1e-14 * std::abs(vs.back());
    ex.method = "last value (increments not decaying)";
    return ex;
  }
  if (n >= 3) {
    // Observed order from the three finest samples; faster than O(d ln d) means the
    // linear models overshoot, so the finest sample is kept with a geometric tail bound.
    double a = vs[n - 2] - vs[n - 3], b = vs[n - 1] - vs[n - 2];
    double r = (ds[n - 3] - ds[n - 2]) / (ds[n - 2] - ds[n - 1]);
    double floor = 1e-14 * std::max(1.0, std::abs(vs.back()));
    if (std::abs(b) > floor && std::abs(a) > floor && r > 1.0) {
      double p = std::log(std::abs(a) / std::abs(b)) / std::log(r);
      if (p > 1.5) {
        ex.value = vs.back();
        ex.error = 2.0 * std::abs(b) / (std::pow(r, p) - 1.0) + floor;
        ex.method = "finest sample (observed order " + std::to_string(p).substr(0, 4) + ")";
        return ex;
      }
    }
  }
  if (n >= 5) {
    int terms = n >= 7 ? 5 : 3;
    double all = model_limit(ds, vs, 0, terms);
    double fine = model_limit(ds, vs, 1, terms);
    ex.value = all;
    ex.error = 2.0 * std::abs(all - fine) + 1e-14 * std::abs(all);
    if (terms == 5) {
      std::vector<double> dc(ds.begin(), ds.end() - 1), vc(vs.begin(), vs.end() - 1);
      ex.error = 3.0 * (std::abs(all - fine) + std::abs(all - model_limit(dc, vc, 0, terms))) + 1e-14 * std::abs(all);
    }
    ex.method = terms == 5 ? "least squares {1, d, d ln d, d^2, d^2 ln d}" : "least squares {1, d, d ln d}";
    return ex;
  }
  double d1 = ds[n - 2], d2 = ds[n - 1];
  double v1 = vs[n - 2], v2 = vs[n - 1];
  ex.value = v2 + (v2 - v1) * d2 / (d1 - d2);
  ex.error = std::abs(ex.value - v2) + 1e-14 * std::abs(ex.value);
  ex.method = "linear in d through the two finest samples";
  return ex;
}

}  // namespace leakywire
