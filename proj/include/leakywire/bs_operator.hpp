#pragma once

#include "leakywire/basis.hpp"
#include "leakywire/kernels.hpp"

#include <Eigen/Dense>

#include <string>

namespace leakywire {

// How the 1/(4 pi p) singularity is subtracted on loops: p periodic with a
// constant log term, or p = |s - t| on (0, L) with the interval log term.
enum class Splitting { Periodic, Interval };

struct AssemblyOptions {
  Splitting splitting = Splitting::Periodic;
  int workers = 1;
};

struct QMatrix {
  double kappa = 1.0;
  double lambda = -1.0;
  std::string curve;
  Eigen::MatrixXd M;  // (Q e_n, e_m)
  Eigen::MatrixXd B;  // (e_n, e_m)
  int basis_size = 0;
  int panels = 0;
  int order = 0;
};

// Galerkin discretization of the symmetrized form
//   (Q f, g) = -(1/8pi) iint (f(s)-f(t))(g(s)-g(t))/p + int Lambda f g + iint R f g
// on a fixed basis.  The lambda-independent parts are assembled once.
class QOperator {
 public:
  explicit QOperator(Basis basis, AssemblyOptions options = {});

  const Basis& basis() const { return basis_; }
  const Domain& domain() const { return basis_.domain(); }
  const AssemblyOptions& options() const { return options_; }
  int size() const { return basis_.size(); }

  const Eigen::MatrixXd& mass() const { return mass_; }
  // -(1/8pi) singular form + log term + curvature kernel part.
  const Eigen::MatrixXd& static_part() const { return static_; }
  // Galerkin matrix of (1/chord - 1/p)/(4 pi).
  const Eigen::MatrixXd& curvature_matrix() const { return curvature_; }

  QMatrix assemble(SpectralParameter z) const;
  // Galerkin matrix of e^{-kappa chord} / (8 pi kappa).
  Eigen::MatrixXd assemble_dlambda(SpectralParameter z) const;
  // Both of the above in one pass over the quadrature points.
  void assemble_with_derivative(SpectralParameter z, Eigen::MatrixXd& M, Eigen::MatrixXd& dM) const;
  // Galerkin matrix of an arbitrary bounded kernel K(s, t, u), u the geometric offset.
  Eigen::MatrixXd assemble_kernel(const PairKernel& kernel) const;
  // Galerkin matrix of K(chord) for a kernel depending on the chord only.
  template <class F>
  Eigen::MatrixXd assemble_chord_kernel(F&& f) const;

  // Parameter distance used for the subtraction at a pair point.
  double split_distance(const PairPoint& x) const {
    return periodic_split_ ? std::abs(x.u) : std::abs(x.pu);
  }

 private:
  template <class F>
  void pair_loop(int outputs, F&& point_fn, std::vector<Eigen::MatrixXd>& result) const;
  void build_static();

  Basis basis_;
  AssemblyOptions options_;
  bool periodic_split_ = false;
  Eigen::MatrixXd mass_, static_, curvature_;
};

QMatrix assemble_q(const Domain& domain, SpectralParameter z, const Basis& basis,
                   AssemblyOptions options = {});
Eigen::MatrixXd assemble_q_dlambda(const Domain& domain, SpectralParameter z, const Basis& basis,
                                   AssemblyOptions options = {});

// b_k(lambda) of the circle: eigenvalue of Q on cos/sin(2 pi k s / L).
double circle_symbol(const Curve& circle, SpectralParameter z, int k);

// ||(M(w) - M(z)) - Galerkin(G_w(chord) - G_z(chord))||_F / ||M(w)||_F
double pseudoresolvent_check(const QOperator& op, SpectralParameter w, SpectralParameter z);

template <class F>
Eigen::MatrixXd QOperator::assemble_chord_kernel(F&& f) const {
  std::vector<Eigen::MatrixXd> out;
  const Curve& curve = domain().curve();
  pair_loop(
      1,
      [&](const PairPoint& x, double* k) { k[0] = f(curve.chord_offset(x.s, x.u)); },
      out);
  return out[0];
}

}  // namespace leakywire

#include "leakywire/detail/pair_loop.hpp"
