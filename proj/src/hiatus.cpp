#include "leakywire/hiatus.hpp"

#include "leakywire/errors.hpp"
#include "leakywire/fitting.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace leakywire {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

HiatusPrediction predict_slopes(const BoundState& state, double s0, const QOperator& op) {
  const Curve& curve = op.domain().curve();
  if (!curve.closed() && !(s0 > 0.0 && s0 < curve.length()))
    throw DomainError("hiatus point must lie strictly inside (0, L)");
  if (curve.closed() && !(s0 >= 0.0 && s0 <= curve.length())) throw DomainError("hiatus point outside [0, L]");
  const int m = state.multiplicity;
  HiatusPrediction hp;
  hp.lambda_L = state.lambda;
  hp.kappa_L = state.kappa();
  hp.s0 = s0;
  hp.first = state.first_branch;
  hp.last = state.first_branch + m - 1;
  hp.phi_s0.resize(m);
  for (int i = 0; i < m; ++i) hp.phi_s0[i] = state.trace(s0, i);

  const double kappa = hp.kappa_L;
  Eigen::MatrixXd K = op.assemble_chord_kernel([kappa](double c) { return std::exp(-kappa * c); });
  hp.gram.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) hp.gram(i, j) = state.coefficients[i].dot(K * state.coefficients[j]);
  hp.gram = 0.5 * (hp.gram + hp.gram.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(hp.gram);
  if (gs.info() != Eigen::Success || !(gs.eigenvalues().minCoeff() > 0.0))
    throw SolverError("Gram matrix of the multiplet is not positive definite");
  hp.omega.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      hp.omega(i, j) = hp.gram(i, j) != 0.0 ? 16.0 * kappa / hp.gram(i, j) : std::numeric_limits<double>::infinity();

  Eigen::MatrixXd W = gs.operatorInverseSqrt();
  Eigen::VectorXd wv = W * hp.phi_s0;
  hp.C = 16.0 * kappa * wv * wv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cs(hp.C);
  hp.slopes = cs.eigenvalues().reverse();
  Eigen::MatrixXd vecs = cs.eigenvectors().rowwise().reverse();

  // Greedy assignment of slopes to members by the largest eigenvector component.
  hp.member_slopes = Eigen::VectorXd::Zero(m);
  std::vector<bool> used_member(m, false);
  for (int k = 0; k < m; ++k) {
    int best = -1;
    double bv = -1.0;
    for (int i = 0; i < m; ++i)
      if (!used_member[i] && std::abs(vecs(i, k)) > bv) {
        bv = std::abs(vecs(i, k));
        best = i;
      }
    used_member[best] = true;
    hp.member_slopes[best] = hp.slopes[k];
  }
  hp.compression_slopes = 0.5 * hp.member_slopes;
  return hp;
}

std::vector<double> default_eps_grid(double length, int count) {
  if (count < 2) throw ConfigError("eps grid needs at least two points");
  std::vector<double> eps(count);
  for (int i = 0; i < count; ++i) eps[i] = length * 1e-2 * std::pow(1e-2, double(i) / (count - 1));
  return eps;
}

FitResult fit_asymptotic(const std::vector<double>& eps, const std::vector<double>& dlambda) {
  if (eps.size() != dlambda.size()) throw ConfigError("fit_asymptotic: size mismatch");
  if (eps.size() < 6) throw FitError("fit_asymptotic needs at least 6 points");
  double lo = *std::min_element(eps.begin(), eps.end()), hi = *std::max_element(eps.begin(), eps.end());
  if (!(lo > 0.0) || std::log10(hi / lo) < 1.5) throw FitError("eps grid must span at least 1.5 decades");
  const int n = int(eps.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = eps[i] * std::log(eps[i]);
    A(i, 1) = eps[i];
    y(i) = dlambda[i];
  }
  LeastSquaresFit f = least_squares(A, y);
  if (f.condition > 1e8) throw FitError("ill-conditioned fit (condition > 1e8); widen the eps span");
  FitResult r;
  r.c1 = f.coeffs(0);
  r.c2 = f.coeffs(1);
  r.residual = f.residual;
  r.condition = f.condition;
  return r;
}

namespace {

struct SampledState {
  std::vector<double> values;
};

std::vector<LinePoint> domain_rule(const PanelMesh& mesh) {
  const GaussRule& g = gauss_legendre(mesh.order());
  std::vector<LinePoint> pts;
  for (const auto& P : mesh.panels())
    for (std::size_t i = 0; i < g.nodes.size(); ++i) pts.push_back({P.lo + P.length() * g.nodes[i], P.length() * g.weights[i]});
  return pts;
}

}  // namespace

SweepResult sweep(const Curve& curve, double alpha, double s0, const SweepOptions& options) {
  SweepResult res;
  res.alpha = alpha;
  res.s0 = s0;
  res.eps = options.eps.empty() ? default_eps_grid(curve.length()) : options.eps;
  for (std::size_t i = 0; i < res.eps.size(); ++i) {
    if (!(res.eps[i] > 0.0)) throw ConfigError("eps grid must be positive");
    if (i > 0 && !(res.eps[i] < res.eps[i - 1])) throw ConfigError("eps grid must be decreasing");
  }
  if (!res.eps.empty() && res.eps.front() > 0.02 * curve.length())
    throw ConfigError("largest eps exceeds 0.02 L");
  for (double e : res.eps) HiatusCurve(curve, s0, e);  // validates s0 +- eps

  QOperator op0(Basis::hat(build_mesh(Domain::whole(curve), options.mesh)), options.assembly);
  SpectrumOptions so = options.spectrum;
  so.s0 = s0;
  res.base = find_bound_states(op0, alpha, so);
  if (res.base.states.empty()) throw SolverError("no bound states at eps = 0; nothing to sweep");

  int needed = 0;
  for (int k : options.states) {
    if (k < 0 || k >= int(res.base.states.size()))
      throw ConfigError("tracked state index outside the unperturbed spectrum");
    const BoundState& st = res.base.states[k];
    res.predictions.push_back(predict_slopes(st, s0, op0));
    needed = std::max(needed, st.first_branch + st.multiplicity);
    for (int m = 0; m < st.multiplicity; ++m) {
      BranchTrack bt;
      bt.state = k;
      bt.member = m;
      bt.lambda_L = st.lambda;
      bt.predicted_slope = res.predictions.back().member_slopes[m];
      bt.compression_slope = res.predictions.back().compression_slopes[m];
      res.branches.push_back(bt);
    }
  }

  SpectrumOptions se = options.spectrum;
  se.lambda_lo = res.base.lambda_lo;
  se.branch_count = needed + 2;
  se.cluster_tol = 1e-14;
  se.s0.reset();
  for (double e : res.eps) {
    Domain dom = HiatusCurve(curve, s0, e).domain();
    PanelMesh mesh = build_mesh(dom, options.mesh);
    double gap_panel = 0.0;
    for (const auto& c : dom.components()) {
      for (double x : {c.lo, c.hi}) {
        double near = curve.closed() ? std::abs(std::remainder(x - s0, curve.length())) : std::abs(x - s0);
        if (std::abs(near - e) < 1e-9 * curve.length()) gap_panel = std::max(gap_panel, mesh.smallest_panel_at(x));
      }
    }
    if (gap_panel > 0.5 * e) throw ConfigError("mesh does not resolve the hiatus (panel at the gap > eps/2)");
    QOperator op(Basis::hat(std::move(mesh)), options.assembly);
    SpectrumResult sr = find_bound_states(op, alpha, se);
    std::vector<LinePoint> rule = domain_rule(op.basis().mesh());
    std::vector<std::vector<double>> cand(sr.states.size());
    for (std::size_t j = 0; j < sr.states.size(); ++j)
      for (const auto& p : rule) cand[j].push_back(sr.states[j].trace(p.s));
    for (auto& bt : res.branches) {
      const BoundState& st0 = res.base.states[bt.state];
      double best = 0.0;
      int bj = -1;
      for (std::size_t j = 0; j < sr.states.size(); ++j) {
        double ov = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) ov += rule[q].w * cand[j][q] * st0.trace(rule[q].s, bt.member);
        if (std::abs(ov) > best) {
          best = std::abs(ov);
          bj = int(j);
        }
      }
      bt.overlap.push_back(best);
      if (bj >= 0 && best > options.overlap_threshold) {
        bt.lambda.push_back(sr.states[bj].lambda);
        if (sr.states[bj].lambda < bt.lambda_L - 1e-9 * std::abs(bt.lambda_L)) bt.sign_ok = false;
      } else {
        bt.lambda.push_back(kNaN);
        bt.broken = true;
      }
    }
  }

  for (auto& bt : res.branches) {
    if (bt.broken) {
      bt.note = "branch lost (overlap below threshold)";
      res.warnings.push_back("state " + std::to_string(bt.state) + " member " + std::to_string(bt.member) +
                             ": " + bt.note);
      continue;
    }
    std::vector<double> dl;
    for (double l : bt.lambda) dl.push_back(l - bt.lambda_L);
    try {
      bt.fit = fit_asymptotic(res.eps, dl);
    } catch (const FitError& e) {
      bt.fit_failed = true;
      bt.note = e.what();
      res.warnings.push_back("state " + std::to_string(bt.state) + " member " + std::to_string(bt.member) +
                             ": " + bt.note);
      continue;
    }
    bt.fitted = true;
    bt.fitted_slope = -bt.fit.c1;
    auto rel = [&](double target) {
      return target != 0.0 ? std::abs(bt.fitted_slope - target) / std::abs(target)
                           : std::numeric_limits<double>::infinity();
    };
    bt.relative_error = rel(bt.predicted_slope);
    bt.compression_relative_error = rel(bt.compression_slope);
  }
  return res;
}

DegenerateReport degenerate_report(const Curve& circle, double alpha, int level, double s0,
                                   SweepOptions options) {
  if (circle.kind() != CurveKind::CircleLoop) throw ConfigError("degenerate_report requires a circle");
  options.states = {level};
  DegenerateReport rep;
  rep.level = level;
  rep.sweep = sweep(circle, alpha, s0, options);
  const BoundState& st = rep.sweep.base.states.at(level);
  if (st.multiplicity != 2) throw SolverError("level is not twofold degenerate within the cluster tolerance");
  const BranchTrack* cosb = nullptr;
  const BranchTrack* sinb = nullptr;
  for (const auto& b : rep.sweep.branches) (b.member == 0 ? cosb : sinb) = &b;
  rep.cosine_predicted = cosb->predicted_slope;
  rep.sine_predicted = sinb->predicted_slope;
  if (cosb->fitted && sinb->fitted) {
    rep.cosine_fitted = cosb->fitted_slope;
    rep.sine_fitted = sinb->fitted_slope;
    rep.sine_to_cosine = std::abs(sinb->fit.c1) / std::abs(cosb->fit.c1);
    rep.cosine_relative_error = cosb->relative_error;
  } else {
    rep.sine_to_cosine = std::numeric_limits<double>::quiet_NaN();
    rep.cosine_relative_error = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace leakywire
