#include "leakywire/bs_operator.hpp"
#include "leakywire/errors.hpp"
#include "leakywire/spectral.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace leakywire;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Cin(x) = int_0^x (1 - cos t)/t dt; the integrand is entire.
double cin(double x) {
  if (x == 0.0) return 0.0;
  const GaussRule& g = gauss_legendre(16);
  int panels = 64;
  double h = x / panels, sum = 0.0;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double t = (p + g.nodes[q]) * h;
      double s = std::sin(0.5 * t);
      sum += h * g.weights[q] * 2.0 * s * s / t;
    }
  return sum;
}

// Symbol of Q on the circle: the log part in closed form, the bounded
// remainder by a plain composite Gauss sum.
double circle_symbol_reference(double L, double kappa, int k) {
  double R = L / (2.0 * kPi), w = 2.0 * kPi * k / L;
  const GaussRule& g = gauss_legendre(12);
  int panels = 400;
  double h = 0.5 * L / panels, smooth = 0.0;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double u = (p + g.nodes[q]) * h;
      double chord = 2.0 * R * std::sin(u / (2.0 * R));
      double r = std::exp(-kappa * chord) / (4.0 * kPi * chord) - 1.0 / (4.0 * kPi * u);
      smooth += h * g.weights[q] * r * std::cos(w * u);
    }
  return std::log(L) / (2.0 * kPi) - cin(kPi * k) / (2.0 * kPi) + 2.0 * smooth;
}

QOperator segment_operator(double L, int panels, int workers = 1) {
  MeshOptions o;
  o.panels = panels;
  AssemblyOptions a;
  a.workers = workers;
  return QOperator(Basis::hat(build_mesh(Domain::whole(Curve::segment(L)), o)), a);
}

QOperator circle_operator(double L, int panels, bool trig, int harmonics = 8) {
  MeshOptions o;
  o.panels = panels;
  PanelMesh m = build_mesh(Domain::whole(Curve::circle(L)), o);
  return QOperator(trig ? Basis::trig(m, harmonics) : Basis::hat(m));
}

}  // namespace

TEST_CASE("circle symbol against an independent splitting") {
  for (double L : {2.0 * kPi, 20.0})
    for (int k : {0, 1, 3, 8}) {
      auto z = SpectralParameter::from_lambda(-1.0);
      CHECK(circle_symbol(Curve::circle(L), z, k) == Approx(circle_symbol_reference(L, 1.0, k)).epsilon(1e-9));
    }
  CHECK_THROWS_AS(circle_symbol(Curve::segment(1.0), SpectralParameter::from_lambda(-1.0), 0), ConfigError);
}

TEST_CASE("hat mass matrix") {
  QOperator op = circle_operator(2.0, 8, false);
  double h = 0.25;
  const auto& B = op.mass();
  CHECK(B(3, 3) == Approx(2.0 * h / 3.0));
  CHECK(B(3, 4) == Approx(h / 6.0));
  CHECK(B(0, 7) == Approx(h / 6.0));
  CHECK(B(0, 4) == 0.0);
}

TEST_CASE("assembled matrices are symmetric") {
  QOperator op = segment_operator(2.0, 32);
  QMatrix q = op.assemble(SpectralParameter::from_lambda(-1.0));
  CHECK((q.M - q.M.transpose()).norm() <= 1e-14 * q.M.norm());
  CHECK(q.basis_size == op.size());
}

TEST_CASE("trig basis diagonalizes the circle operator") {
  double L = 2.0 * kPi;
  QOperator op = circle_operator(L, 64, true, 8);
  auto z = SpectralParameter::from_lambda(-1.0);
  QMatrix q = op.assemble(z);
  Eigen::MatrixXd off = q.M;
  for (int i = 0; i < op.size(); ++i) {
    double b = circle_symbol(Curve::circle(L), z, (i + 1) / 2);
    CHECK(q.M(i, i) / q.B(i, i) == Approx(b).epsilon(1e-8));
    off(i, i) = 0.0;
  }
  CHECK(off.norm() <= 1e-8 * q.M.norm());
}

TEST_CASE("hat spectrum on the circle approaches the symbol") {
  double L = 2.0 * kPi;
  QOperator op = circle_operator(L, 128, false);
  auto z = SpectralParameter::from_lambda(-1.0);
  EtaBranches eb = eta_branches(op.assemble(z));
  CHECK(eb.values(0) == Approx(circle_symbol(Curve::circle(L), z, 0)).epsilon(1e-5));
  for (int k = 1; k <= 3; ++k) {
    double b = circle_symbol(Curve::circle(L), z, k);
    CHECK(eb.values(2 * k - 1) == Approx(b).epsilon(1e-4));
    CHECK(eb.values(2 * k) == Approx(b).epsilon(1e-4));
  }
}

TEST_CASE("pseudo-resolvent identity") {
  auto w = SpectralParameter::from_lambda(-1.0), z = SpectralParameter::from_lambda(-2.0);
  CHECK(pseudoresolvent_check(segment_operator(2.0, 64), w, z) <= 1e-10);
  CHECK(pseudoresolvent_check(circle_operator(2.0 * kPi, 64, false), w, z) <= 1e-10);
}

TEST_CASE("lambda derivative matches finite differences") {
  QOperator op = segment_operator(3.0, 16);
  double lambda = -1.5, h = 1e-5;
  Eigen::MatrixXd fd = (op.assemble(SpectralParameter::from_lambda(lambda + h)).M -
                        op.assemble(SpectralParameter::from_lambda(lambda - h)).M) /
                       (2.0 * h);
  Eigen::MatrixXd dM = op.assemble_dlambda(SpectralParameter::from_lambda(lambda));
  CHECK((dM - fd).norm() <= 1e-7 * dM.norm());
  Eigen::MatrixXd M2, dM2;
  op.assemble_with_derivative(SpectralParameter::from_lambda(lambda), M2, dM2);
  CHECK((dM2 - dM).norm() <= 1e-14 * dM.norm());
  CHECK((M2 - op.assemble(SpectralParameter::from_lambda(lambda)).M).norm() <= 1e-14 * M2.norm());
}

TEST_CASE("assembly does not depend on the worker count") {
  auto z = SpectralParameter::from_lambda(-1.3);
  Eigen::MatrixXd a = segment_operator(5.0, 48, 1).assemble(z).M;
  Eigen::MatrixXd b = segment_operator(5.0, 48, 4).assemble(z).M;
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-13 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("constant function on a straight segment") {
  // (Q 1, 1) = int Lambda + iint green_smooth; both sides computed independently
  double L = 2.0, kappa = 1.0;
  QOperator op = segment_operator(L, 64);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(op.size());
  double form = one.dot(op.assemble(SpectralParameter::from_kappa(kappa)).M * one);
  // int_0^L ln(4 s (L - s)) ds = L ln 4 + 2 L ln L - 2 L
  double log_part = (L * std::log(4.0) + 2.0 * L * std::log(L) - 2.0 * L) / (4.0 * kPi);
  // iint (e^{-k|s-t|} - 1)/(4 pi |s-t|) = (1/2pi) int_0^L (L - u)(e^{-k u} - 1)/u du
  const GaussRule& g = gauss_legendre(16);
  double smooth = 0.0;
  int panels = 200;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double u = (p + g.nodes[q]) * L / panels;
      smooth += L / panels * g.weights[q] * (L - u) * std::expm1(-kappa * u) / u;
    }
  smooth /= 2.0 * kPi;
  CHECK(form == Approx(log_part + smooth).epsilon(1e-9));
}

TEST_CASE("interval splitting on a loop gives the same operator") {
  double L = 2.0 * kPi;
  MeshOptions o;
  o.panels = 64;
  PanelMesh m = build_mesh(Domain::whole(Curve::circle(L)), o);
  AssemblyOptions a;
  a.splitting = Splitting::Interval;
  auto z = SpectralParameter::from_lambda(-1.0);
  EtaBranches p = eta_branches(QOperator(Basis::hat(m)).assemble(z));
  EtaBranches i = eta_branches(QOperator(Basis::hat(m), a).assemble(z));
  for (int k = 0; k < 5; ++k) CHECK(i.values(k) == Approx(p.values(k)).epsilon(1e-6));
}
