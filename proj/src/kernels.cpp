#include "leakywire/kernels.hpp"

#include "leakywire/errors.hpp"

#include <cmath>
#include <numbers>

namespace leakywire {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

SpectralParameter SpectralParameter::from_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive and finite");
  return SpectralParameter(kappa);
}

SpectralParameter SpectralParameter::from_lambda(double lambda) {
  if (!(lambda < 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be negative and finite");
  return SpectralParameter(std::sqrt(-lambda));
}

double green(double kappa, double rho) {
  if (!(rho > 0.0)) throw DomainError("green: distance must be positive");
  return std::exp(-kappa * rho) / (kFourPi * rho);
}

double green_smooth(double kappa, double rho) {
  if (rho < 0.0) throw DomainError("green_smooth: distance must be nonnegative");
  if (rho == 0.0) return -kappa / kFourPi;
  return std::expm1(-kappa * rho) / (kFourPi * rho);
}

double green_dlambda(double kappa, double rho) {
  if (!(kappa > 0.0)) throw DomainError("green_dlambda: kappa must be positive");
  if (rho < 0.0) throw DomainError("green_dlambda: distance must be nonnegative");
  return std::exp(-kappa * rho) / (2.0 * kFourPi * kappa);
}

double curvature_kernel(double chord, double p) { return (p - chord) / (kFourPi * chord * p); }

double remainder(const Curve& curve, double kappa, double s, double t) {
  double p = curve.param_distance(s, t);
  if (p == 0.0) throw DomainError("remainder: s and t coincide");
  double c = curve.chord(s, t);
  return green_smooth(kappa, c) + curvature_kernel(c, p);
}

double diagonal_log(const Domain& domain, double s) {
  if (domain.periodic()) {
    double length = domain.curve().length();
    if (!(s >= 0.0 && s <= length)) throw DomainError("diagonal_log: s outside [0, L]");
    return std::log(length) / (2.0 * std::numbers::pi);
  }
  int ci = domain.component_of(s);
  if (ci < 0) throw DomainError("diagonal_log: s not strictly inside a domain component");
  const auto& comps = domain.components();
  double a = comps[ci].lo, b = comps[ci].hi;
  double v = std::log(4.0 * (s - a) * (b - s));
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (int(k) == ci) continue;
    double c = comps[k].lo, d = comps[k].hi;
    if (c > s)
      v += std::log((d - s) / (c - s));
    else
      v += std::log((s - c) / (s - d));
  }
  return v / kFourPi;
}

}  // namespace leakywire
