// Acceptance run: one PASS/FAIL line per criterion, followed by detail lines.
#include "leakywire/hiatus.hpp"
#include "leakywire/regcheck.hpp"
#include "leakywire/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

using namespace leakywire;

namespace {

constexpr double kPi = std::numbers::pi;

int workers() {
  if (const char* w = std::getenv("LEAKYWIRE_WORKERS")) return std::max(1, std::atoi(w));
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

QOperator hat_operator(const Curve& c, int panels) {
  MeshOptions o;
  o.panels = panels;
  AssemblyOptions a;
  a.workers = workers();
  return QOperator(Basis::hat(build_mesh(Domain::whole(c), o)), a);
}

Outcome pseudo_resolvent() {
  auto w = SpectralParameter::from_lambda(-1.0), z = SpectralParameter::from_lambda(-2.0);
  double seg = pseudoresolvent_check(hat_operator(Curve::segment(2.0), 64), w, z);
  double circ = pseudoresolvent_check(hat_operator(Curve::circle(2.0 * kPi), 64), w, z);
  return {seg <= 1e-10 && circ <= 1e-10, fmt("segment %.2e, circle %.2e (limit 1e-10)", seg, circ), {}};
}

Outcome circle_diagonalization() {
  double L = 2.0 * kPi;
  Curve c = Curve::circle(L);
  auto z = SpectralParameter::from_lambda(-1.0);
  EtaBranches e = eta_branches(hat_operator(c, 512).assemble(z));
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) {
    double b = circle_symbol(c, z, k);
    for (int m : k == 0 ? std::vector<int>{0} : std::vector<int>{2 * k - 1, 2 * k})
      worst = std::max(worst, std::abs(e.values(m) - b) / std::abs(b));
  }
  MeshOptions o;
  o.panels = 64;
  QOperator trig(Basis::trig(build_mesh(Domain::whole(c), o), 8));
  QMatrix q = trig.assemble(z);
  Eigen::MatrixXd off = q.M;
  off.diagonal().setZero();
  double offrel = off.norm() / q.M.norm();
  return {worst <= 1e-4 && offrel <= 1e-8,
          fmt("hat N=512 worst |eta - b_k|/|b_k| = %.2e for |k| <= 8 (limit 1e-4); trig off-diagonal %.2e (limit 1e-8)",
              worst, offrel),
          {}};
}

Outcome short_segment() {
  double L = 1.5;
  QOperator op = hat_operator(Curve::segment(L), 128);
  SpectrumResult r = find_bound_states(op, 0.0);
  double published = std::log(L / 2.0) / (2.0 * kPi);
  double sharp = std::log(L) / (2.0 * kPi);
  double top = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    double lambda = -10.0 * std::pow(1e-4, i / 19.0);
    top = std::max(top, eta_branches(op.assemble(SpectralParameter::from_lambda(lambda))).values(0));
  }
  Outcome o;
  o.pass = r.states.empty() && top < published;
  o.summary = fmt("L = 1.5: %zu bound state(s), max eta over lambda in [-10, -1e-3] = %.6f vs (1/2pi) ln(L/2) = %.6f",
                  r.states.size(), top, published);
  if (!r.states.empty()) o.details.push_back(fmt("lambda_0 = %.10f", r.states[0].lambda));
  o.details.push_back(fmt("sup of the diagonal term is (1/2pi) ln L = %.6f; max eta below it: %s; no-binding length "
                          "from it is exp(2 pi alpha) = %.4f < 1.5",
                          sharp, top < sharp ? "yes" : "no", thresholds(0.0).L_no_bind_sharp));
  return o;
}

Outcome bracketing() {
  double L = 20.0;
  double xi0 = thresholds(0.0).xi0;
  double l256 = find_bound_states(hat_operator(Curve::segment(L), 256), 0.0).states.at(0).lambda;
  double l512 = find_bound_states(hat_operator(Curve::segment(L), 512), 0.0).states.at(0).lambda;
  double printed = xi0 + 1.0 / (L * L);
  double dirichlet = xi0 + kPi * kPi / (L * L);
  bool converged = std::abs(l512 - l256) <= 5e-4 * std::abs(l512);
  Outcome o;
  o.pass = l512 <= printed && converged;
  o.summary = fmt("lambda_0(N=512) = %.8f vs xi0 + L^-2 = %.8f; N=256 -> 512 change %.2e", l512, printed,
                  std::abs(l512 - l256));
  o.details.push_back(fmt("with the Dirichlet interval bound xi0 + pi^2/L^2 = %.8f: %s", dirichlet,
                          l512 <= dirichlet ? "satisfied" : "violated"));
  o.details.push_back(fmt("xi0 = %.8f < lambda_0: %s", xi0, l512 > xi0 ? "yes" : "no"));
  return o;
}

Outcome hiatus_simple() {
  double L = 20.0;
  SweepOptions opt;
  opt.mesh.panels = 512;
  opt.assembly.workers = workers();
  opt.spectrum.branch_count = 2;
  SweepResult r = sweep(Curve::segment(L), 0.0, 0.5 * L, opt);
  const BranchTrack& b = r.branches.at(0);
  bool sign = true;
  for (std::size_t i = 0; i < r.eps.size(); ++i) sign = sign && b.lambda[i] > b.lambda_L;
  Outcome o;
  o.pass = b.fitted && b.relative_error <= 0.15 && sign;
  o.summary = fmt("fitted -c1 = %.5f vs predicted 16 kappa phi^2/g = %.5f (rel. error %.3f, limit 0.15); lambda(eps) > "
                  "lambda_L at all %zu eps: %s",
                  b.fitted_slope, b.predicted_slope, b.relative_error, r.eps.size(), sign ? "yes" : "no");
  o.details.push_back(fmt("fitted / predicted = %.4f; against 8 kappa phi^2/g = %.5f the rel. error is %.3f",
                          b.fitted_slope / b.predicted_slope, b.compression_slope, b.compression_relative_error));
  for (const auto& w : r.warnings) o.details.push_back("warning: " + w);
  return o;
}

Outcome hiatus_degenerate() {
  SweepOptions opt;
  opt.mesh.panels = 256;
  opt.assembly.workers = workers();
  opt.spectrum.branch_count = 4;
  DegenerateReport d = degenerate_report(Curve::circle(20.0), 0.0, 1, 3.0, opt);
  Outcome o;
  o.pass = d.sine_to_cosine <= 0.1 && d.cosine_relative_error <= 0.2;
  o.summary = fmt("sine/cosine slope ratio %.4f (limit 0.1); cosine fitted %.5f vs predicted %.5f (rel. error %.3f, "
                  "limit 0.2)",
                  d.sine_to_cosine, d.cosine_fitted, d.cosine_predicted, d.cosine_relative_error);
  for (const auto& b : d.sweep.branches)
    if (b.member == 0)
      o.details.push_back(fmt("cosine mode against 8 kappa phi^2/g = %.5f: rel. error %.3f", b.compression_slope,
                              b.compression_relative_error));
  return o;
}

Outcome regularization() {
  Outcome o;
  o.pass = true;
  struct Case {
    const char* name;
    Curve curve;
  };
  for (const Case& c : {Case{"segment L=2", Curve::segment(2.0)}, Case{"circle L=2pi", Curve::circle(2.0 * kPi)}}) {
    double L = c.curve.length();
    std::vector<double> pts = {0.2 * L, 0.35 * L, 0.5 * L, 0.65 * L, 0.8 * L};
    RegcheckReport rep = regcheck_suite(c.curve, -1.0, pts, default_d_grid(c.curve));
    double worst_ct = 0.0, worst_ratio = 0.0;
    for (const auto& row : rep.rows) {
      const auto& run = row.run;
      if (std::abs(run.counterterm_target) > 1e-3)
        worst_ct = std::max(worst_ct, std::abs(run.counterterm_slope / run.counterterm_target - 1.0));
      worst_ratio = std::max(worst_ratio, std::abs(run.limit.value - row.direct) / (run.limit.error + rep.direct_error));
    }
    bool ok = rep.all_agree && rep.family_independent && rep.counterterms_ok;
    o.pass = o.pass && ok;
    o.details.push_back(fmt("%s: %zu rows, agree with direct %s (worst |limit - direct| / error %.2f), family "
                            "independent %s, worst counterterm deviation %.2f%%",
                            c.name, rep.rows.size(), rep.all_agree ? "yes" : "no", worst_ratio,
                            rep.family_independent ? "yes" : "no", 100.0 * worst_ct));
  }
  o.summary = "6 functions x 5 points x 2 families on segment and circle";
  return o;
}

Outcome trace_asymptotics() {
  double alpha = -0.2;
  SpectrumResult r = find_bound_states(hat_operator(Curve::segment(20.0), 256), alpha);
  TraceAsymptoticsReport t = trace_asymptotics_check(r.states.at(0), {1e-2, 1e-3, 1e-4});
  Outcome o;
  o.pass = t.strictly_decreasing && t.relative_limit_deviation <= 0.05;
  o.summary = fmt("alpha = %.1f, L = 20: deviations %.3e, %.3e, %.3e; extrapolated %.3e = %.2f%% of ||alpha phi||",
                  alpha, t.deviation[0], t.deviation[1], t.deviation[2], t.limit_deviation,
                  100.0 * t.relative_limit_deviation);
  return o;
}

Outcome monotonicity() {
  Outcome o;
  QOperator op = hat_operator(Curve::segment(6.0), 96);
  // M(lambda2) - M(lambda1) is positive semidefinite for lambda2 > lambda1
  double worst_psd = 0.0, worst_eta = 0.0;
  Eigen::VectorXd prev;
  Eigen::MatrixXd prevM;
  for (double lambda : {-6.0, -3.0, -1.5, -0.75, -0.3, -0.05}) {
    QMatrix q = op.assemble(SpectralParameter::from_lambda(lambda));
    Eigen::VectorXd v = eta_branches(q).values;
    if (prev.size()) {
      worst_eta = std::min(worst_eta, (v - prev).minCoeff());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.M - prevM);
      worst_psd = std::min(worst_psd, es.eigenvalues().minCoeff() / es.eigenvalues().cwiseAbs().maxCoeff());
    }
    prev = v;
    prevM = q.M;
  }
  bool eta_ok = worst_eta >= -1e-9 && worst_psd >= -1e-9;

  QOperator op2 = hat_operator(Curve::segment(10.0), 64);
  std::vector<double> l0;
  for (double alpha : {-0.2, 0.0, 0.2}) l0.push_back(find_bound_states(op2, alpha).states.at(0).lambda);
  bool alpha_ok = l0[1] >= l0[0] - 1e-9 && l0[2] >= l0[1] - 1e-9;

  MeshOptions mo;
  mo.panels = 48;
  PanelMesh coarse = build_mesh(Domain::whole(Curve::segment(10.0)), mo);
  QOperator a(Basis::hat(coarse)), b(Basis::hat(coarse.refined()));
  auto z = SpectralParameter::from_lambda(-0.8);
  Eigen::VectorXd ea = eta_branches(a.assemble(z)).values, eb = eta_branches(b.assemble(z)).values;
  double worst_enrich = 0.0;
  for (int j = 0; j < 6; ++j) worst_enrich = std::min(worst_enrich, eb(j) - ea(j));
  SpectrumResult sa = find_bound_states(a, 0.0), sb = find_bound_states(b, 0.0);
  bool lambda_down = sb.states.size() >= sa.states.size();
  for (std::size_t j = 0; j < std::min(sa.states.size(), sb.states.size()); ++j)
    lambda_down = lambda_down && sb.states[j].lambda <= sa.states[j].lambda + 1e-9;
  bool enrich_ok = worst_enrich >= -1e-9 && lambda_down;

  o.pass = eta_ok && alpha_ok && enrich_ok;
  o.summary = fmt("eta in lambda %s, lambda_0 in alpha %s, enrichment %s", eta_ok ? "ok" : "violated",
                  alpha_ok ? "ok" : "violated", enrich_ok ? "ok" : "violated");
  o.details.push_back(fmt("min eta increment %.2e, min relative eigenvalue of M(l2) - M(l1) %.2e", worst_eta, worst_psd));
  o.details.push_back(fmt("lambda_0(alpha = -0.2, 0, 0.2) = %.8f, %.8f, %.8f", l0[0], l0[1], l0[2]));
  o.details.push_back(fmt("min eta gain under refinement %.2e; bound states %zu -> %zu", worst_enrich,
                          sa.states.size(), sb.states.size()));
  return o;
}

Outcome positivity() {
  double L = 20.0;
  Curve c = Curve::segment(L);
  SpectrumResult r = find_bound_states(hat_operator(c, 128), 0.0);
  const BoundState& g = r.states.at(0);
  const Eigen::VectorXd& x = g.coefficients.at(0);
  bool definite = (x.array() > 0.0).all() || (x.array() < 0.0).all();
  double sign = x.sum() > 0.0 ? 1.0 : -1.0;
  int n = 20, checked = 0, negative = 0;
  double smallest = INFINITY;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 p(-5.0 + 30.0 * i / (n - 1), -5.0 + 10.0 * j / (n - 1) + 0.013, -5.0 + 10.0 * k / (n - 1) + 0.007);
        double psi = sign * psi_eval(g, p);
        ++checked;
        if (!(psi > 0.0)) ++negative;
        smallest = std::min(smallest, psi);
      }
  return {definite && negative == 0,
          fmt("coefficients sign-definite: %s; psi > 0 at %d of %d grid points (min %.3e)", definite ? "yes" : "no",
              checked - negative, checked, smallest),
          {}};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "pseudo-resolvent identity", pseudo_resolvent},
      {2, "circle diagonalization", circle_diagonalization},
      {3, "no binding on a short segment", short_segment},
      {4, "bracketing of the long segment ground state", bracketing},
      {5, "hiatus slope, simple eigenvalue", hiatus_simple},
      {6, "hiatus slope, twofold circle level", hiatus_degenerate},
      {7, "regularization independence", regularization},
      {8, "trace asymptotics", trace_asymptotics},
      {9, "monotonicity", monotonicity},
      {10, "ground state positivity", positivity},
  };
  int passed = 0, errors = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
      ++errors;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str(), secs);
    for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
    std::fflush(stdout);
    passed += o.pass;
  }
  std::printf("%d of %zu criteria pass\n", passed, criteria.size());
  return errors == 0 ? 0 : 1;
}
