#pragma once

#include "leakywire/bs_operator.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace leakywire {

// Eigenvalues eta_j (descending) and B-orthonormal eigenvectors of M x = eta B x.
struct EtaBranches {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Solver for the pencil with a fixed mass matrix (factored once).
class PencilSolver {
 public:
  explicit PencilSolver(const Eigen::MatrixXd& B);
  EtaBranches solve(const Eigen::MatrixXd& M) const;

 private:
  Eigen::MatrixXd L_;
};

EtaBranches eta_branches(const QMatrix& q);

struct BoundState {
  double lambda = 0.0;
  int multiplicity = 1;
  int first_branch = 0;                    // index of the top member among the eta branches
  std::vector<Eigen::VectorXd> coefficients;  // one per degenerate member
  std::vector<double> residuals;           // ||(M - alpha B) x|| / ||B x||
  std::shared_ptr<const Basis> basis;
  double alpha = 0.0;

  double kappa() const;
  // Trace eigenfunction phi_member(s), normalized in L^2.
  double trace(double s, int member = 0) const;
};

struct BranchFailure {
  int branch;
  std::string reason;
};

struct SpectrumOptions {
  std::optional<double> lambda_lo;
  double lambda_hi = -1e-8;
  int branch_count = 8;
  double root_tol = 1e-10;
  double cluster_tol = 1e-6;
  std::optional<double> s0;  // designated point for the canonical rotation of multiplets
  int max_iterations = 100;
};

struct SpectrumResult {
  double alpha = 0.0;
  std::string curve;
  std::vector<BoundState> states;  // increasing lambda
  std::vector<BranchFailure> failures;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  int basis_size = 0;
  int evaluations = 0;
  SpectrumOptions options;
};

SpectrumResult find_bound_states(const QOperator& op, double alpha, const SpectrumOptions& options = {});

struct Thresholds {
  double alpha;
  double L_no_bind;        // 2 exp(2 pi alpha), the published no-binding length
  double L_no_bind_sharp;  // exp(2 pi alpha): sup of the diagonal term is (1/2pi) ln L
  double L_exists;
  double xi0;
  double psi1;
  double ratio() const { return L_exists / L_no_bind; }
};

constexpr double kDigammaOne = -0.57721566490153286061;

Thresholds thresholds(double alpha);

struct CurvatureBound {
  double D;
  double no_bind_length;  // exp(2 pi (alpha - D)), from sup sigma(Q) <= (1/2pi) ln L + D
  double kernel_max;      // largest kernel value on the sample grid
};

CurvatureBound curvature_norm_bound(const QOperator& op, double alpha);

// psi(x) = int G(|x - gamma(t)|) phi(t) dt
double psi_eval(const BoundState& state, const Vec3& x, int member = 0);

struct TraceAsymptoticsReport {
  std::vector<double> d;
  std::vector<double> deviation;      // L^2 norm over the interior of psi|_{Gamma_d} + phi ln d/(2pi) - alpha phi
  bool strictly_decreasing = false;
  double limit_deviation = 0.0;       // extrapolated (d -> 0) deviation
  double limit_error = 0.0;
  double reference_norm = 0.0;        // ||alpha phi|| on the interior
  double relative_limit_deviation = 0.0;
  std::vector<double> samples;        // s values used
};

// d_grid decreasing; interior_fraction of the parameter range is used (centered).
TraceAsymptoticsReport trace_asymptotics_check(const BoundState& state, const std::vector<double>& d_grid,
                                               double interior_fraction = 0.8,
                                               double normal_sign = 1.0);

}  // namespace leakywire
