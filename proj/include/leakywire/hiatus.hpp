#pragma once

#include "leakywire/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace leakywire {

struct HiatusPrediction {
  double lambda_L = 0.0;
  double kappa_L = 0.0;
  double s0 = 0.0;
  int first = 0;  // degenerate block m..n as branch indices
  int last = 0;
  Eigen::VectorXd phi_s0;  // phi_i(s0)
  Eigen::MatrixXd gram;    // g_ij = iint e^{-kappa chord} phi_i(s) phi_j(t)
  Eigen::MatrixXd omega;   // 16 kappa / g_ij, entrywise (inf where g_ij = 0)
  Eigen::MatrixXd C;       // 16 kappa G^{-1/2} v v^T G^{-1/2}
  Eigen::VectorXd slopes;  // eigenvalues of C, descending
  Eigen::VectorXd member_slopes;  // slope associated with each multiplet member
  // Same construction with 8 kappa in place of 16 kappa: the slope implied by the
  // first-order compression estimate (Q phi 1_{gap}, phi 1_{gap}) = pi^{-1} phi(s0)^2 eps ln eps.
  Eigen::VectorXd compression_slopes;
};

// op must be the operator the state was computed with.
HiatusPrediction predict_slopes(const BoundState& state, double s0, const QOperator& op);

// Default grid: count points, geometric, from 1e-4 L to 1e-2 L, decreasing.
std::vector<double> default_eps_grid(double length, int count = 8);

struct FitResult {
  double c1 = 0.0;  // coefficient of eps ln eps
  double c2 = 0.0;  // coefficient of eps
  double residual = 0.0;
  double condition = 0.0;
};

// Least squares of dlambda against c1 eps ln eps + c2 eps.
FitResult fit_asymptotic(const std::vector<double>& eps, const std::vector<double>& dlambda);

struct SweepOptions {
  std::vector<double> eps;          // empty selects default_eps_grid
  MeshOptions mesh;
  AssemblyOptions assembly;
  SpectrumOptions spectrum;
  std::vector<int> states = {0};    // indices into the unperturbed spectrum
  double overlap_threshold = 0.5;
};

struct BranchTrack {
  int state = 0;
  int member = 0;
  double lambda_L = 0.0;
  double predicted_slope = 0.0;
  std::vector<double> lambda;   // per eps (NaN where the branch was lost)
  std::vector<double> overlap;  // |overlap| with the unperturbed member
  bool broken = false;
  bool sign_ok = true;          // lambda(eps) >= lambda_L - tol everywhere
  bool fitted = false;
  bool fit_failed = false;      // fit_asymptotic rejected the data (see note)
  FitResult fit;
  double fitted_slope = 0.0;    // -c1
  double relative_error = 0.0;  // |fitted - predicted| / predicted
  double compression_slope = 0.0;
  double compression_relative_error = 0.0;
  std::string note;
};

struct SweepResult {
  double alpha = 0.0;
  double s0 = 0.0;
  std::vector<double> eps;
  SpectrumResult base;
  std::vector<HiatusPrediction> predictions;  // one per tracked state
  std::vector<BranchTrack> branches;
  std::vector<std::string> warnings;
};

SweepResult sweep(const Curve& curve, double alpha, double s0, const SweepOptions& options);

struct DegenerateReport {
  SweepResult sweep;
  int level = 0;
  double cosine_predicted = 0.0;
  double cosine_fitted = 0.0;
  double sine_predicted = 0.0;
  double sine_fitted = 0.0;
  double sine_to_cosine = 0.0;      // |c1 sine| / |c1 cosine|
  double cosine_relative_error = 0.0;
};

// level indexes the unperturbed spectrum; the state must be a twofold multiplet.
DegenerateReport degenerate_report(const Curve& circle, double alpha, int level, double s0,
                                   SweepOptions options);

}  // namespace leakywire
