#pragma once

#include "leakywire/geometry.hpp"

namespace leakywire {

// Real spectral parameter lambda = -kappa^2 < 0; kappa is the stored quantity.
class SpectralParameter {
 public:
  static SpectralParameter from_kappa(double kappa);
  static SpectralParameter from_lambda(double lambda);
  double kappa() const { return kappa_; }
  double lambda() const { return -kappa_ * kappa_; }

 private:
  explicit SpectralParameter(double kappa) : kappa_(kappa) {}
  double kappa_;
};

// e^{-kappa rho} / (4 pi rho)
double green(double kappa, double rho);
// (e^{-kappa rho} - 1) / (4 pi rho), extended by -kappa / (4 pi) at rho = 0
double green_smooth(double kappa, double rho);
// e^{-kappa rho} / (8 pi kappa) = d/dlambda green
double green_dlambda(double kappa, double rho);
// (1/chord - 1/p) / (4 pi), evaluated as (p - chord) / (4 pi chord p)
double curvature_kernel(double chord, double p);

// green(chord) - 1/(4 pi p) with p the parameter distance (periodic on loops).
double remainder(const Curve& curve, double kappa, double s, double t);

// Logarithmic diagonal coefficient of the symmetrized form on a domain.
double diagonal_log(const Domain& domain, double s);

}  // namespace leakywire
