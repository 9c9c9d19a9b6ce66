#include "leakywire/bs_operator.hpp"

#include "leakywire/errors.hpp"

#include <cmath>
#include <numbers>

namespace leakywire {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

QOperator::QOperator(Basis basis, AssemblyOptions options)
    : basis_(std::move(basis)), options_(options) {
  if (options_.workers < 1) throw ConfigError("worker count must be at least 1");
  periodic_split_ = domain().periodic() && options_.splitting == Splitting::Periodic;
  if (basis_.kind() == BasisKind::Trig && !domain().periodic())
    throw ConfigError("trigonometric basis requires a closed curve without hiatus");
  build_static();
}

void QOperator::build_static() {
  const PanelMesh& mesh = basis_.mesh();
  const Curve& curve = domain().curve();
  const int np = mesh.size();
  const int n = basis_.size();
  const int workers = std::max(1, std::min(options_.workers, np));

  // Singular form and curvature kernel, one pass.
  std::vector<Eigen::MatrixXd> accS(workers, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXd> accD(workers, Eigen::MatrixXd::Zero(n, n));
  PairQuadrature pq(mesh);
  parallel_for(np, workers, [&](int p, int w) {
    std::vector<PairPoint> pts;
    const auto& aP = basis_.active(p);
    const int nP = int(aP.size());
    std::vector<double> vP(nP), vQ, diff;
    std::vector<int> uni, posP(nP), posQ;
    Eigen::MatrixXd S, D;
    for (int q = p; q < np; ++q) {
      const auto& aQ = basis_.active(q);
      const int nQ = int(aQ.size());
      vQ.resize(nQ);
      posQ.resize(nQ);
      uni.assign(aP.begin(), aP.end());
      for (int i = 0; i < nP; ++i) posP[i] = i;
      for (int j = 0; j < nQ; ++j) {
        int found = -1;
        for (int i = 0; i < int(uni.size()); ++i)
          if (uni[i] == aQ[j]) found = i;
        if (found < 0) {
          found = int(uni.size());
          uni.push_back(aQ[j]);
        }
        posQ[j] = found;
      }
      const int nU = int(uni.size());
      diff.resize(nU);
      S.setZero(nU, nU);
      D.setZero(nP, nQ);
      pts.clear();
      pq.generate(p, q, pts);
      for (const auto& x : pts) {
        double dist = split_distance(x);
        double c = curve.chord_offset(x.s, x.u);
        basis_.evaluate(p, x.s, vP.data());
        basis_.evaluate(q, x.t, vQ.data());
        std::fill(diff.begin(), diff.end(), 0.0);
        for (int i = 0; i < nP; ++i) diff[posP[i]] += vP[i];
        for (int j = 0; j < nQ; ++j) diff[posQ[j]] -= vQ[j];
        double ws = x.w / dist;
        for (int i = 0; i < nU; ++i) {
          double a = ws * diff[i];
          for (int j = 0; j < nU; ++j) S(i, j) += a * diff[j];
        }
        double wk = x.w * curvature_kernel(c, dist);
        for (int i = 0; i < nP; ++i) {
          double a = wk * vP[i];
          for (int j = 0; j < nQ; ++j) D(i, j) += a * vQ[j];
        }
      }
      double f = p == q ? 1.0 : 2.0;
      auto& gS = accS[w];
      for (int i = 0; i < nU; ++i)
        for (int j = 0; j < nU; ++j) gS(uni[i], uni[j]) += f * S(i, j);
      auto& gD = accD[w];
      for (int i = 0; i < nP; ++i)
        for (int j = 0; j < nQ; ++j) {
          gD(aP[i], aQ[j]) += D(i, j);
          if (q != p) gD(aQ[j], aP[i]) += D(i, j);
        }
    }
  });
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  curvature_ = Eigen::MatrixXd::Zero(n, n);
  for (int w = 0; w < workers; ++w) {
    S += accS[w];
    curvature_ += accD[w];
  }
  S = 0.5 * (S + S.transpose()).eval();
  curvature_ = 0.5 * (curvature_ + curvature_.transpose()).eval();

  // Mass and log term, panel by panel.
  mass_ = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd logm = Eigen::MatrixXd::Zero(n, n);
  Domain logdom = domain();
  if (domain().periodic() && !periodic_split_)
    logdom = Domain::intervals(curve, {{0.0, curve.length()}});
  std::vector<double> singular;
  if (!logdom.periodic())
    for (const auto& c : logdom.components()) {
      singular.push_back(c.lo);
      singular.push_back(c.hi);
    }
  const GaussRule& g = gauss_legendre(mesh.order() + 2);
  std::vector<LinePoint> lp;
  std::vector<double> v(basis_.size());
  for (int p = 0; p < np; ++p) {
    const Panel& P = mesh.panels()[p];
    const auto& a = basis_.active(p);
    const int nP = int(a.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      double s = P.lo + P.length() * g.nodes[i];
      double w = P.length() * g.weights[i];
      basis_.evaluate(p, s, v.data());
      for (int r = 0; r < nP; ++r)
        for (int c = 0; c < nP; ++c) mass_(a[r], a[c]) += w * v[r] * v[c];
    }
    if (logdom.periodic()) continue;
    lp.clear();
    log_panel_rule(P.lo, P.hi, singular, mesh.order(), lp);
    for (const auto& x : lp) {
      double lam = diagonal_log(logdom, x.s);
      basis_.evaluate(p, x.s, v.data());
      for (int r = 0; r < nP; ++r)
        for (int c = 0; c < nP; ++c) logm(a[r], a[c]) += x.w * lam * v[r] * v[c];
    }
  }
  mass_ = 0.5 * (mass_ + mass_.transpose()).eval();
  if (logdom.periodic()) logm = (std::log(curve.length()) / (2.0 * kPi)) * mass_;
  logm = 0.5 * (logm + logm.transpose()).eval();
  static_ = -S / (8.0 * kPi) + logm + curvature_;
}

QMatrix QOperator::assemble(SpectralParameter z) const {
  const double kappa = z.kappa();
  Eigen::MatrixXd A = assemble_chord_kernel([kappa](double c) { return green_smooth(kappa, c); });
  QMatrix q;
  q.kappa = kappa;
  q.lambda = z.lambda();
  q.curve = domain().curve().describe();
  q.M = static_ + A;
  q.B = mass_;
  q.basis_size = size();
  q.panels = basis_.mesh().size();
  q.order = basis_.mesh().order();
  return q;
}

Eigen::MatrixXd QOperator::assemble_dlambda(SpectralParameter z) const {
  const double kappa = z.kappa();
  return assemble_chord_kernel([kappa](double c) { return green_dlambda(kappa, c); });
}

void QOperator::assemble_with_derivative(SpectralParameter z, Eigen::MatrixXd& M,
                                         Eigen::MatrixXd& dM) const {
  const double kappa = z.kappa();
  const Curve& curve = domain().curve();
  const double c4 = 1.0 / (4.0 * kPi), c8 = 1.0 / (8.0 * kPi * kappa);
  std::vector<Eigen::MatrixXd> out;
  pair_loop(
      2,
      [&](const PairPoint& x, double* k) {
        double c = curve.chord_offset(x.s, x.u);
        double e = std::exp(-kappa * c);
        k[0] = c > 0.0 ? std::expm1(-kappa * c) * c4 / c : -kappa * c4;
        k[1] = e * c8;
      },
      out);
  M = static_ + out[0];
  dM = out[1];
}

Eigen::MatrixXd QOperator::assemble_kernel(const PairKernel& kernel) const {
  std::vector<Eigen::MatrixXd> out;
  pair_loop(
      1, [&](const PairPoint& x, double* k) { k[0] = kernel(x.s, x.t, x.u); }, out);
  return out[0];
}

QMatrix assemble_q(const Domain& domain, SpectralParameter z, const Basis& basis,
                   AssemblyOptions options) {
  (void)domain;
  return QOperator(basis, options).assemble(z);
}

Eigen::MatrixXd assemble_q_dlambda(const Domain& domain, SpectralParameter z, const Basis& basis,
                                   AssemblyOptions options) {
  (void)domain;
  return QOperator(basis, options).assemble_dlambda(z);
}

double circle_symbol(const Curve& circle, SpectralParameter z, int k) {
  if (circle.kind() != CurveKind::CircleLoop) throw ConfigError("circle_symbol requires a circle");
  const double L = circle.length();
  const double kappa = z.kappa();
  const double w = 2.0 * kPi * std::abs(k) / L;
  const GaussRule& g = gauss_legendre(20);
  // Composite rule on (0, L/2], graded toward 0.
  double total = 0.0;
  double hi = 0.5 * L;
  std::vector<double> cuts;
  for (double x = hi; x > 1e-14 * L; x *= 0.5) cuts.push_back(x);
  cuts.push_back(0.0);
  auto integrand = [&](double u) {
    double osc = std::cos(w * u);
    // (cos - 1)/u with the subtraction done through sin^2.
    double s = std::sin(0.5 * w * u);
    double cm1 = -2.0 * s * s;
    double c = (L / kPi) * std::sin(kPi * u / L);
    double r = green_smooth(kappa, c) + curvature_kernel(c, u);
    return cm1 / (4.0 * kPi * u) + r * osc;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i + 1], b = cuts[i];
    int sub = b - a > 0.05 * L ? 16 : 1;
    for (int j = 0; j < sub; ++j) {
      double lo = a + (b - a) * j / sub, h = (b - a) / sub;
      for (std::size_t q = 0; q < g.nodes.size(); ++q) total += h * g.weights[q] * integrand(lo + h * g.nodes[q]);
    }
  }
  return 2.0 * total + std::log(L) / (2.0 * kPi);
}

double pseudoresolvent_check(const QOperator& op, SpectralParameter w, SpectralParameter z) {
  if (w.kappa() == z.kappa()) return 0.0;
  Eigen::MatrixXd Mw = op.assemble(w).M;
  Eigen::MatrixXd Mz = op.assemble(z).M;
  const double kw = w.kappa(), kz = z.kappa();
  Eigen::MatrixXd K = op.assemble_chord_kernel([kw, kz](double c) { return green(kw, c) - green(kz, c); });
  return ((Mw - Mz) - K).norm() / Mw.norm();
}

}  // namespace leakywire
