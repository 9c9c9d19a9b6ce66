#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace leakywire {

struct LeastSquaresFit {
  Eigen::VectorXd coeffs;
  double residual = 0.0;   // ||A c - y||_2
  double condition = 1.0;  // 2-norm condition number of A
};

LeastSquaresFit least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;  // false: increments grew, value is the last sample
  std::string method;
};

// Limit as d -> 0 of samples v(d).  With five or more points the samples are fit
// to {1, d, d ln d} and the error is twice the change when the coarsest point is
// dropped; seven or more points add d^2 and d^2 ln d, and the error is three times the
// summed changes from dropping the coarsest and the finest point.  With fewer points a
// linear fit through the two finest points is used.  When the three finest samples show
// an observed order above 1.5 the finest sample is returned with a geometric tail bound.
Extrapolation extrapolate_to_zero(const std::vector<double>& d, const std::vector<double>& values);

}  // namespace leakywire
