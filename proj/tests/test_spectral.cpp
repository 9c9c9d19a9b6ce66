#include "leakywire/errors.hpp"
#include "leakywire/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace leakywire;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

QOperator hat_operator(const Curve& c, int panels) {
  MeshOptions o;
  o.panels = panels;
  return QOperator(Basis::hat(build_mesh(Domain::whole(c), o)));
}

// Root of circle_symbol(k) = alpha in lambda by bisection.
double circle_level(double L, int k, double alpha) {
  Curve c = Curve::circle(L);
  double lo = -50.0, hi = -1e-6;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (circle_symbol(c, SpectralParameter::from_lambda(mid), k) > alpha)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("threshold constants") {
  Thresholds t = thresholds(0.0);
  CHECK(t.L_no_bind == Approx(2.0));
  CHECK(t.L_no_bind_sharp == Approx(1.0));
  CHECK(t.L_exists == Approx(11.1908).epsilon(1e-5));
  CHECK(t.xi0 == Approx(-1.260947).epsilon(1e-6));
  CHECK(t.psi1 == Approx(-0.5772156649));
  for (double a : {-0.3, 0.0, 0.2}) CHECK(thresholds(a).ratio() == Approx(kPi * std::exp(0.5772156649015329)));
  CHECK(thresholds(0.1).L_exists == Approx(thresholds(0.0).L_exists * std::exp(0.2 * kPi)));
  CHECK(thresholds(0.1).xi0 == Approx(thresholds(0.0).xi0 * std::exp(-0.4 * kPi)));
}

TEST_CASE("generalized eigenproblem") {
  Eigen::MatrixXd B(2, 2), M(2, 2);
  B << 2, 1, 1, 2;
  M << 1, 0, 0, -1;
  EtaBranches e = PencilSolver(B).solve(M);
  // det(M - eta B) = 3 eta^2 - 1
  CHECK(e.values(0) == Approx(1.0 / std::sqrt(3.0)));
  CHECK(e.values(1) == Approx(-1.0 / std::sqrt(3.0)));
  Eigen::VectorXd x = e.vectors.col(0);
  CHECK(x.dot(B * x) == Approx(1.0));
  CHECK(((M - e.values(0) * B) * x).norm() < 1e-13);
}

TEST_CASE("circle levels match the symbol roots") {
  double L = 2.0 * kPi;
  Curve c = Curve::circle(L);
  SpectrumResult r = find_bound_states(hat_operator(c, 128), 0.0);
  REQUIRE(r.states.size() >= 2);
  CHECK(r.states[0].multiplicity == 1);
  CHECK(r.states[1].multiplicity == 2);
  CHECK(r.states[0].lambda == Approx(circle_level(L, 0, 0.0)).epsilon(1e-4));
  CHECK(r.states[1].lambda == Approx(circle_level(L, 1, 0.0)).epsilon(1e-4));
  for (const auto& s : r.states)
    for (double res : s.residuals) CHECK(res < 1e-8);

  MeshOptions o;
  o.panels = 64;
  QOperator trig(Basis::trig(build_mesh(Domain::whole(c), o), 6));
  SpectrumResult t = find_bound_states(trig, 0.0);
  REQUIRE(t.states.size() >= 2);
  CHECK(t.states[0].lambda == Approx(circle_level(L, 0, 0.0)).epsilon(1e-8));
  CHECK(t.states[1].lambda == Approx(circle_level(L, 1, 0.0)).epsilon(1e-8));
}

TEST_CASE("long segment ground state lies between the line level and the bracketing bound") {
  double L = 20.0;
  SpectrumResult r = find_bound_states(hat_operator(Curve::segment(L), 128), 0.0);
  REQUIRE_FALSE(r.states.empty());
  double xi0 = thresholds(0.0).xi0;
  CHECK(r.states[0].lambda > xi0);
  CHECK(r.states[0].lambda <= xi0 + kPi * kPi / (L * L));
  for (std::size_t i = 1; i < r.states.size(); ++i) CHECK(r.states[i].lambda > r.states[i - 1].lambda);
}

TEST_CASE("short segment has no bound states") {
  double L = 0.9;
  QOperator op = hat_operator(Curve::segment(L), 64);
  SpectrumResult r = find_bound_states(op, 0.0);
  CHECK(r.states.empty());
  for (double lambda : {-10.0, -1.0, -1e-3}) {
    EtaBranches e = eta_branches(op.assemble(SpectralParameter::from_lambda(lambda)));
    CHECK(e.values(0) < std::log(L) / (2.0 * kPi));
  }
}

TEST_CASE("eta branches increase with lambda") {
  QOperator op = hat_operator(Curve::segment(4.0), 48);
  Eigen::VectorXd prev;
  for (double lambda : {-8.0, -4.0, -2.0, -1.0, -0.5, -0.1}) {
    Eigen::VectorXd v = eta_branches(op.assemble(SpectralParameter::from_lambda(lambda))).values;
    if (prev.size()) CHECK(((v - prev).array() >= -1e-12).all());
    prev = v;
  }
  // dM/dlambda is a Gram matrix of a positive kernel
  Eigen::MatrixXd dM = op.assemble_dlambda(SpectralParameter::from_lambda(-1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dM);
  CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().maxCoeff());
}

TEST_CASE("ground state is positive on and off the curve") {
  Curve c = Curve::segment(6.0);
  SpectrumResult r = find_bound_states(hat_operator(c, 64), 0.0);
  REQUIRE_FALSE(r.states.empty());
  const BoundState& g = r.states[0];
  for (double s = 0.05; s < 6.0; s += 0.25) CHECK(g.trace(s) > 0.0);

  // L^2 normalization of the trace
  const GaussRule& q = gauss_legendre(16);
  double norm = 0.0;
  int panels = 120;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double s = (p + q.nodes[i]) * 6.0 / panels;
      norm += 6.0 / panels * q.weights[i] * g.trace(s) * g.trace(s);
    }
  CHECK(norm == Approx(1.0).epsilon(1e-6));

  for (const Vec3& x : {Vec3(3, 0.5, 0), Vec3(-1, 1, 1), Vec3(7, 0, -2)}) {
    double psi = psi_eval(g, x);
    CHECK(psi > 0.0);
    // brute force int G(|x - gamma(t)|) phi(t) dt
    double ref = 0.0;
    for (int p = 0; p < panels; ++p)
      for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        double t = (p + q.nodes[i]) * 6.0 / panels;
        ref += 6.0 / panels * q.weights[i] * green(g.kappa(), (x - c.point(t)).norm()) * g.trace(t);
      }
    CHECK(psi == Approx(ref).epsilon(1e-8));
  }
  CHECK_THROWS_AS(psi_eval(g, c.point(2.0)), DomainError);
}

TEST_CASE("coupling monotonicity") {
  QOperator op = hat_operator(Curve::segment(10.0), 64);
  double prev = -1e9;
  for (double alpha : {-0.2, 0.0, 0.2}) {
    SpectrumResult r = find_bound_states(op, alpha);
    REQUIRE_FALSE(r.states.empty());
    CHECK(r.states[0].lambda >= prev);
    prev = r.states[0].lambda;
  }
}

TEST_CASE("curvature bound") {
  CurvatureBound s = curvature_norm_bound(hat_operator(Curve::segment(3.0), 16), 0.1);
  CHECK(s.D == Approx(0.0).scale(1.0));
  CHECK(s.no_bind_length == Approx(std::exp(0.2 * kPi)));
  CurvatureBound c = curvature_norm_bound(hat_operator(Curve::circle(2.0 * kPi), 32), 0.0);
  CHECK(c.D > 0.0);
  CHECK(c.no_bind_length < 1.0);
}
