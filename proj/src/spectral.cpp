#include "leakywire/spectral.hpp"

#include "leakywire/errors.hpp"
#include "leakywire/fitting.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace leakywire {

namespace {

constexpr double kPi = std::numbers::pi;

std::string matrix_diagnostics(const Eigen::MatrixXd& M) {
  std::ostringstream os;
  os << "size " << M.rows() << ", norm " << M.norm() << ", asymmetry " << (M - M.transpose()).norm()
     << ", finite " << (M.allFinite() ? "yes" : "no");
  return os.str();
}

// Integrals of the basis functions.
Eigen::VectorXd basis_integrals(const Basis& basis, const Eigen::MatrixXd& B) {
  if (basis.kind() == BasisKind::Trig) return B.col(0);
  return B.rowwise().sum();
}

void fix_sign(Eigen::VectorXd& x, const Eigen::VectorXd& integrals, double length) {
  double mean = integrals.dot(x);
  if (std::abs(mean) > 1e-10 * std::sqrt(length)) {
    if (mean < 0.0) x = -x;
    return;
  }
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (x[imax] < 0.0) x = -x;
}

}  // namespace

PencilSolver::PencilSolver(const Eigen::MatrixXd& B) {
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw SolverError("mass matrix is not positive definite: " + matrix_diagnostics(B));
  L_ = llt.matrixL();
}

EtaBranches PencilSolver::solve(const Eigen::MatrixXd& M) const {
  if (M.rows() != L_.rows()) throw ConfigError("pencil dimension mismatch");
  auto Lt = L_.triangularView<Eigen::Lower>();
  Eigen::MatrixXd C = Lt.solve(M);
  C = Lt.solve(C.transpose()).transpose();
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw SolverError("symmetric eigensolver failed: " + matrix_diagnostics(M));
  const int n = int(C.rows());
  EtaBranches eb;
  eb.values.resize(n);
  eb.vectors.resize(n, n);
  Eigen::MatrixXd X = L_.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
  for (int j = 0; j < n; ++j) {
    eb.values[j] = es.eigenvalues()[n - 1 - j];
    eb.vectors.col(j) = X.col(n - 1 - j);
  }
  return eb;
}

EtaBranches eta_branches(const QMatrix& q) { return PencilSolver(q.B).solve(q.M); }

double BoundState::kappa() const { return std::sqrt(-lambda); }

double BoundState::trace(double s, int member) const {
  if (member < 0 || member >= int(coefficients.size())) throw ConfigError("no such multiplet member");
  return basis->combination(coefficients[member], s);
}

namespace {

struct Evaluation {
  Eigen::VectorXd eta;
  Eigen::VectorXd deta;
  Eigen::MatrixXd vectors;
  Eigen::MatrixXd M;
};

class BranchEvaluator {
 public:
  BranchEvaluator(const QOperator& op, int count) : op_(op), pencil_(op.mass()), count_(count) {}

  const Evaluation& at(double lambda) {
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
    Eigen::MatrixXd M, dM;
    op_.assemble_with_derivative(SpectralParameter::from_lambda(lambda), M, dM);
    EtaBranches eb = pencil_.solve(M);
    Evaluation e;
    int k = std::min<int>(count_, int(eb.values.size()));
    e.eta = eb.values.head(k);
    e.vectors = eb.vectors.leftCols(k);
    e.deta.resize(k);
    for (int j = 0; j < k; ++j) e.deta[j] = e.vectors.col(j).dot(dM * e.vectors.col(j));
    e.M = std::move(M);
    ++evaluations_;
    return cache_.emplace(lambda, std::move(e)).first->second;
  }

  int evaluations() const { return evaluations_; }

 private:
  const QOperator& op_;
  PencilSolver pencil_;
  int count_;
  int evaluations_ = 0;
  std::map<double, Evaluation> cache_;
};

}  // namespace

SpectrumResult find_bound_states(const QOperator& op, double alpha, const SpectrumOptions& options) {
  if (!(options.lambda_hi < 0.0)) throw DomainError("upper end of the lambda bracket must be negative");
  double lo = options.lambda_lo.value_or(4.0 * thresholds(alpha).xi0);
  if (!(lo < options.lambda_hi)) throw DomainError("lambda bracket is empty");
  SpectrumResult res;
  res.alpha = alpha;
  res.curve = op.domain().curve().describe();
  res.basis_size = op.size();
  res.options = options;
  res.lambda_hi = options.lambda_hi;

  const int count = std::min(options.branch_count, op.size());
  BranchEvaluator ev(op, count);
  const Evaluation& top = ev.at(options.lambda_hi);
  std::vector<int> candidates;
  for (int j = 0; j < count; ++j)
    if (top.eta[j] > alpha) candidates.push_back(j);

  if (!candidates.empty()) {
    // Widen the lower end until every candidate branch is below alpha there.
    int widen = 0;
    while (ev.at(lo).eta[candidates.front()] >= alpha && widen < 6) {
      lo *= 4.0;
      ++widen;
    }
  }
  res.lambda_lo = lo;

  struct Root {
    int branch;
    double lambda;
  };
  std::vector<Root> roots;
  for (int j : candidates) {
    double a = lo, b = options.lambda_hi;
    double Fa = ev.at(a).eta[j] - alpha, Fb = ev.at(b).eta[j] - alpha;
    if (!(Fa < 0.0)) {
      res.failures.push_back({j, "root not bracketed: eta above alpha at the lower end"});
      continue;
    }
    double x = a - Fa * (b - a) / (Fb - Fa);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    bool done = false;
    for (int it = 0; it < options.max_iterations && !done; ++it) {
      const Evaluation& e = ev.at(x);
      double F = e.eta[j] - alpha, dF = e.deta[j];
      if (F == 0.0) break;
      if (F > 0.0)
        b = x;
      else
        a = x;
      double xn = x - F / dF;
      if (!(dF > 0.0) || !(xn > a && xn < b)) xn = 0.5 * (a + b);
      if (std::abs(xn - x) <= options.root_tol * std::abs(x) || (b - a) <= options.root_tol * std::abs(x))
        done = true;
      x = xn;
    }
    if (!done && ev.at(x).eta[j] != alpha) {
      res.failures.push_back({j, "root iteration did not converge"});
      continue;
    }
    roots.push_back({j, x});
  }
  std::sort(roots.begin(), roots.end(), [](const Root& r, const Root& s) { return r.lambda < s.lambda; });

  auto basis = std::make_shared<const Basis>(op.basis());
  const Eigen::MatrixXd& B = op.mass();
  Eigen::VectorXd integrals = basis_integrals(op.basis(), B);
  const double length = op.domain().measure();
  for (std::size_t i = 0; i < roots.size();) {
    std::size_t k = i + 1;
    while (k < roots.size() &&
           std::abs(roots[k].lambda - roots[i].lambda) <= options.cluster_tol * std::abs(roots[i].lambda))
      ++k;
    BoundState st;
    st.alpha = alpha;
    st.basis = basis;
    st.multiplicity = int(k - i);
    st.first_branch = roots[i].branch;
    double mean = 0.0;
    for (std::size_t r = i; r < k; ++r) mean += roots[r].lambda;
    st.lambda = roots[i].lambda;
    if (st.multiplicity > 1) st.lambda = mean / st.multiplicity;
    const Evaluation& e = ev.at(st.lambda);
    Eigen::MatrixXd X(op.size(), st.multiplicity);
    for (int m = 0; m < st.multiplicity; ++m) X.col(m) = e.vectors.col(roots[i + m].branch);
    if (st.multiplicity > 1 && options.s0) {
      Eigen::VectorXd v(st.multiplicity);
      for (int m = 0; m < st.multiplicity; ++m) v[m] = basis->combination(X.col(m), *options.s0);
      double nv = v.norm();
      if (nv > 0.0) {
        // Orthogonal Q with first column v/|v|: members 2.. vanish at s0.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
        Eigen::MatrixXd Q = qr.householderQ();
        if (Q.col(0).dot(v) < 0.0) Q.col(0) = -Q.col(0);
        X = (X * Q).eval();
      }
    }
    for (int m = 0; m < st.multiplicity; ++m) {
      Eigen::VectorXd x = X.col(m);
      if (!(st.multiplicity > 1 && options.s0 && m == 0)) fix_sign(x, integrals, length);
      st.coefficients.push_back(x);
      Eigen::VectorXd Bx = B * x;
      st.residuals.push_back((e.M * x - alpha * Bx).norm() / Bx.norm());
    }
    res.states.push_back(std::move(st));
    i = k;
  }
  res.evaluations = ev.evaluations();
  return res;
}

Thresholds thresholds(double alpha) {
  Thresholds t;
  t.alpha = alpha;
  t.psi1 = kDigammaOne;
  t.L_no_bind = 2.0 * std::exp(2.0 * kPi * alpha);
  t.L_no_bind_sharp = std::exp(2.0 * kPi * alpha);
  t.L_exists = 2.0 * kPi * std::exp(2.0 * kPi * alpha - kDigammaOne);
  t.xi0 = -4.0 * std::exp(2.0 * (-2.0 * kPi * alpha + kDigammaOne));
  return t;
}

CurvatureBound curvature_norm_bound(const QOperator& op, double alpha) {
  const Curve& curve = op.domain().curve();
  const double L = curve.length();
  CurvatureBound cb;
  cb.kernel_max = 0.0;
  const int n = 96;
  for (int i = 0; i < n; ++i) {
    double s = 0.5 * L * (1.0 - std::cos(kPi * (i + 0.5) / n));
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double t = 0.5 * L * (1.0 - std::cos(kPi * (j + 0.5) / n));
      double k = curvature_kernel(curve.chord(s, t), curve.param_distance(s, t));
      if (!std::isfinite(k) || k > 1e8)
        throw SolverError("curvature kernel unbounded on the sample grid (regularity violated)");
      cb.kernel_max = std::max(cb.kernel_max, k);
    }
  }
  EtaBranches eb = PencilSolver(op.mass()).solve(op.curvature_matrix());
  cb.D = std::max(0.0, eb.values[0]);
  if (cb.kernel_max == 0.0) cb.D = 0.0;
  cb.no_bind_length = std::exp(2.0 * kPi * (alpha - cb.D));
  return cb;
}

double psi_eval(const BoundState& state, const Vec3& x, int member) {
  const Basis& basis = *state.basis;
  const PanelMesh& mesh = basis.mesh();
  const Curve& curve = basis.domain().curve();
  const double kappa = state.kappa();
  const Eigen::VectorXd& coeff = state.coefficients.at(member);
  const GaussRule& g = gauss_legendre(mesh.order());
  std::vector<LinePoint> pts;
  double total = 0.0;
  for (const Panel& P : mesh.panels()) {
    double h = P.length();
    double rough = std::min({(x - curve.eval(P.lo)).norm(), (x - curve.eval(P.hi)).norm(),
                             (x - curve.eval(0.5 * (P.lo + P.hi))).norm()});
    pts.clear();
    if (rough > 2.0 * h) {
      for (std::size_t i = 0; i < g.nodes.size(); ++i) pts.push_back({P.lo + h * g.nodes[i], h * g.weights[i]});
    } else {
      // Nearest parameter by golden-section search on the panel.
      double a = P.lo, b = P.hi;
      const double r = 0.5 * (std::sqrt(5.0) - 1.0);
      auto f = [&](double t) { return (x - curve.eval(t)).squaredNorm(); };
      double c = b - r * (b - a), d = a + r * (b - a);
      double fc = f(c), fd = f(d);
      for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - r * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + r * (b - a);
          fd = f(d);
        }
      }
      double tstar = 0.5 * (a + b);
      for (double e : {P.lo, P.hi})
        if (f(e) < f(tstar)) tstar = e;
      double dmin = std::sqrt(f(tstar));
      if (dmin <= 1e-9) throw DomainError("psi_eval: point lies on the curve");
      graded_line_rule(P.lo, P.hi, tstar, std::max(0.25 * dmin, 1e-3 * h), 16, pts);
    }
    for (const auto& p : pts) total += p.w * green(kappa, (x - curve.eval(p.s)).norm()) * basis.combination(coeff, p.s);
  }
  return total;
}

TraceAsymptoticsReport trace_asymptotics_check(const BoundState& state, const std::vector<double>& d_grid,
                                               double interior_fraction, double normal_sign) {
  if (d_grid.size() < 2) throw ConfigError("trace_asymptotics_check needs at least two offsets");
  for (std::size_t i = 1; i < d_grid.size(); ++i)
    if (!(d_grid[i] < d_grid[i - 1])) throw ConfigError("offset grid must be decreasing");
  const Domain& dom = state.basis->domain();
  const Curve& curve = dom.curve();
  if (dom.components().size() != 1) throw ConfigError("trace_asymptotics_check expects a single component");
  const Interval I = dom.components()[0];
  const double margin = 0.5 * (1.0 - interior_fraction) * I.length();
  const double a = I.lo + margin, b = I.hi - margin;
  const int panels = 32;
  const GaussRule& g = gauss_legendre(4);
  std::vector<double> s, w;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      double h = (b - a) / panels;
      s.push_back(a + h * (p + g.nodes[i]));
      w.push_back(h * g.weights[i]);
    }
  ComparisonFamily fam;
  fam.normal_sign = normal_sign;
  TraceAsymptoticsReport rep;
  rep.d = d_grid;
  rep.samples = s;
  const std::size_t ns = s.size();
  std::vector<std::vector<double>> values(ns);
  std::vector<double> phi(ns);
  for (std::size_t i = 0; i < ns; ++i) phi[i] = state.trace(s[i]);
  for (double d : d_grid) {
    double dev = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      Vec3 x = comparison_point(fam, curve, s[i], d);
      double v = psi_eval(state, x) + phi[i] * std::log(d) / (2.0 * kPi);
      values[i].push_back(v);
      double r = v - state.alpha * phi[i];
      dev += w[i] * r * r;
    }
    rep.deviation.push_back(std::sqrt(dev));
  }
  rep.strictly_decreasing = true;
  for (std::size_t k = 1; k < rep.deviation.size(); ++k)
    if (!(rep.deviation[k] < rep.deviation[k - 1])) rep.strictly_decreasing = false;
  double lim = 0.0, err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    Extrapolation ex = extrapolate_to_zero(d_grid, values[i]);
    double r = ex.value - state.alpha * phi[i];
    lim += w[i] * r * r;
    err += w[i] * ex.error * ex.error;
    ref += w[i] * state.alpha * state.alpha * phi[i] * phi[i];
  }
  rep.limit_deviation = std::sqrt(lim);
  rep.limit_error = std::sqrt(err);
  rep.reference_norm = std::sqrt(ref);
  rep.relative_limit_deviation = rep.reference_norm > 0.0 ? rep.limit_deviation / rep.reference_norm
                                                           : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace leakywire
