#include "leakywire/errors.hpp"
#include "leakywire/hiatus.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace leakywire;
using doctest::Approx;

TEST_CASE("default hiatus grid") {
  auto e = default_eps_grid(20.0);
  REQUIRE(e.size() == 8);
  CHECK(e.front() == Approx(0.2));
  CHECK(e.back() == Approx(2e-3));
  CHECK(std::is_sorted(e.rbegin(), e.rend()));
  CHECK(e[1] / e[0] == Approx(e[7] / e[6]));
}

TEST_CASE("asymptotic fit on synthetic data") {
  std::vector<double> eps, dl;
  for (double e = 1e-2; e > 1e-4; e *= 0.5) {
    eps.push_back(e);
    dl.push_back(-0.8 * e * std::log(e) + 0.3 * e);
  }
  FitResult f = fit_asymptotic(eps, dl);
  CHECK(f.c1 == Approx(-0.8));
  CHECK(f.c2 == Approx(0.3));
  CHECK(f.residual < 1e-12);
  CHECK_THROWS_AS(fit_asymptotic({1e-2}, {1e-3}), FitError);
}

TEST_CASE("slope prediction against a brute-force gram integral") {
  Curve c = Curve::segment(8.0);
  MeshOptions o;
  o.panels = 64;
  QOperator op(Basis::hat(build_mesh(Domain::whole(c), o)));
  SpectrumOptions so;
  so.branch_count = 1;
  SpectrumResult r = find_bound_states(op, 0.0, so);
  REQUIRE_FALSE(r.states.empty());
  const BoundState& g = r.states[0];
  HiatusPrediction p = predict_slopes(g, 4.0, op);

  // iint e^{-kappa |s - t|} phi(s) phi(t)
  const GaussRule& q = gauss_legendre(12);
  int panels = 80;
  double h = 8.0 / panels;
  std::vector<double> s, w, phi;
  for (int i = 0; i < panels; ++i)
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      s.push_back((i + q.nodes[k]) * h);
      w.push_back(h * q.weights[k]);
      phi.push_back(g.trace(s.back()));
    }
  double gram = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      gram += w[i] * w[j] * std::exp(-g.kappa() * std::abs(s[i] - s[j])) * phi[i] * phi[j];
  CHECK(p.gram(0, 0) == Approx(gram).epsilon(1e-5));
  double phi0 = g.trace(4.0);
  CHECK(p.phi_s0(0) == Approx(phi0));
  CHECK(p.slopes(0) == Approx(16.0 * g.kappa() * phi0 * phi0 / gram).epsilon(1e-5));
  CHECK(p.compression_slopes(0) == Approx(0.5 * p.slopes(0)));
}

TEST_CASE("a hiatus raises the eigenvalue") {
  Curve c = Curve::segment(8.0);
  SweepOptions o;
  o.mesh.panels = 48;
  o.eps = {0.08, 0.04, 0.02, 0.01, 0.005, 0.0025};
  o.spectrum.branch_count = 2;
  SweepResult r = sweep(c, 0.0, 4.0, o);
  REQUIRE(r.branches.size() == 1);
  const BranchTrack& b = r.branches[0];
  CHECK(b.sign_ok);
  CHECK_FALSE(b.broken);
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    CHECK(b.lambda[i] > b.lambda_L);
    if (i > 0) CHECK(b.lambda[i] < b.lambda[i - 1]);
    CHECK(b.overlap[i] > 0.9);
  }
  CHECK(b.fitted);
  CHECK(b.fitted_slope > 0.0);
}

TEST_CASE("hiatus configuration errors") {
  Curve c = Curve::segment(4.0);
  SweepOptions o;
  o.mesh.panels = 16;
  o.eps = {0.5};
  CHECK_THROWS(sweep(c, 0.0, 0.2, o));
  o.states = {9};
  o.eps = {0.01};
  CHECK_THROWS(sweep(c, 0.0, 2.0, o));
}
