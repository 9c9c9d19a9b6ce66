#include "commands.hpp"

#include "leakywire/errors.hpp"
#include "leakywire/regcheck.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace leakywire::cli {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ostream& log(const Context& ctx) { return ctx.log ? *ctx.log : std::cerr; }

ordered_json tolerances(const RunConfig& c) {
  ordered_json t;
  t["root_tol"] = c.spectrum.root_tol;
  t["cluster_tol"] = c.spectrum.cluster_tol;
  t["lambda_lo"] = c.spectrum.lambda_lo ? ordered_json(*c.spectrum.lambda_lo) : ordered_json(nullptr);
  t["lambda_hi"] = c.spectrum.lambda_hi;
  t["branch_count"] = c.spectrum.branch_count;
  t["max_iterations"] = c.spectrum.max_iterations;
  return t;
}

ordered_json provenance(const Context& ctx, const std::string& command) {
  const RunConfig& c = ctx.config;
  ordered_json p;
  p["tool"] = "leakywire";
  p["version"] = kToolVersion;
  p["command"] = command;
  p["config_hash"] = "fnv1a64:" + hex64(c.hash);
  p["workers"] = c.workers;
  p["tolerances"] = tolerances(c);
  p["defaults_applied"] = c.defaults;
  return p;
}

std::string csv_preamble(const Context& ctx, const std::string& command) {
  const RunConfig& c = ctx.config;
  std::ostringstream os;
  os << "# leakywire " << kToolVersion << " " << command << " config_hash=fnv1a64:" << hex64(c.hash)
     << " workers=" << c.workers << "\n";
  os << "# root_tol=" << format_double(c.spectrum.root_tol) << " cluster_tol=" << format_double(c.spectrum.cluster_tol)
     << " lambda_hi=" << format_double(c.spectrum.lambda_hi) << "\n";
  return os.str();
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json vec(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

ordered_json mat(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

struct Setup {
  Curve curve;
  QOperator op;
};

Setup build(const Context& ctx) {
  Curve curve = make_curve(ctx.config.curve);
  Basis basis = make_basis(Domain::whole(curve), ctx.config.mesh);
  if (ctx.verbose)
    log(ctx) << "assembling " << curve.describe() << " with " << basis.size() << " basis functions\n";
  return {curve, QOperator(std::move(basis), assembly_options(ctx.config))};
}

ordered_json curve_json(const Curve& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind());
  j["length"] = c.length();
  j["description"] = c.describe();
  return j;
}

ordered_json basis_json(const QOperator& op) {
  ordered_json j;
  j["kind"] = op.basis().kind() == BasisKind::Trig ? "trig" : "hat";
  j["size"] = op.size();
  j["panels"] = op.basis().mesh().size();
  j["order"] = op.basis().mesh().order();
  return j;
}

ordered_json spectrum_json(const SpectrumResult& r) {
  ordered_json j;
  j["alpha"] = r.alpha;
  j["lambda_window"] = {r.lambda_lo, r.lambda_hi};
  j["evaluations"] = r.evaluations;
  j["states"] = ordered_json::array();
  for (std::size_t k = 0; k < r.states.size(); ++k) {
    const BoundState& st = r.states[k];
    ordered_json s;
    s["index"] = k;
    s["lambda"] = st.lambda;
    s["kappa"] = st.kappa();
    s["multiplicity"] = st.multiplicity;
    s["first_branch"] = st.first_branch;
    s["residuals"] = st.residuals;
    const Domain& dom = st.basis->domain();
    ordered_json sgrid = ordered_json::array(), phi = ordered_json::array();
    const int n = 65;
    std::vector<double> ss;
    for (const auto& c : dom.components())
      for (int i = 0; i < n; ++i) ss.push_back(c.lo + (c.hi - c.lo) * i / (n - 1));
    for (double x : ss) sgrid.push_back(x);
    for (int m = 0; m < st.multiplicity; ++m) {
      ordered_json row = ordered_json::array();
      for (double x : ss) row.push_back(st.trace(x, m));
      phi.push_back(row);
    }
    s["trace"] = {{"s", sgrid}, {"phi", phi}};
    j["states"].push_back(s);
  }
  j["failures"] = ordered_json::array();
  for (const auto& f : r.failures) j["failures"].push_back({{"branch", f.branch}, {"reason", f.reason}});
  return j;
}

}  // namespace

int cmd_spectrum(const Context& ctx) {
  Setup s = build(ctx);
  SpectrumResult r = find_bound_states(s.op, ctx.config.alpha, ctx.config.spectrum);
  ordered_json j;
  j["provenance"] = provenance(ctx, "spectrum");
  j["curve"] = curve_json(s.curve);
  j["basis"] = basis_json(s.op);
  j.update(spectrum_json(r));
  std::filesystem::create_directories(ctx.out);
  write_json(ctx.out / "spectrum.json", j);
  if (ctx.verbose) log(ctx) << r.states.size() << " bound state(s) found\n";
  return r.states.empty() ? kNoBoundStates : kOk;
}

int cmd_existence(const Context& ctx) {
  Setup s = build(ctx);
  const double alpha = ctx.config.alpha;
  const double L = s.curve.length();
  Thresholds t = thresholds(alpha);
  ordered_json j;
  j["provenance"] = provenance(ctx, "existence");
  j["curve"] = curve_json(s.curve);
  j["alpha"] = alpha;
  j["thresholds"] = {{"L_no_bind", t.L_no_bind}, {"L_exists", t.L_exists}, {"ratio", t.ratio()},
                     {"L_no_bind_sharp", t.L_no_bind_sharp}, {"xi0", t.xi0}, {"psi1", t.psi1}};
  std::string verdict = "undetermined";
  if (s.curve.kind() == CurveKind::Segment) {
    if (L < t.L_no_bind_sharp)
      verdict = "no_bound_state";
    else if (L > t.L_exists)
      verdict = "bound_state_exists";
  } else {
    CurvatureBound cb = curvature_norm_bound(s.op, alpha);
    j["curvature_bound"] = {{"D", cb.D}, {"no_bind_length", cb.no_bind_length}, {"kernel_max", cb.kernel_max}};
    if (L < cb.no_bind_length) verdict = "no_bound_state";
  }
  j["verdict"] = verdict;
  std::filesystem::create_directories(ctx.out);
  write_json(ctx.out / "existence.json", j);
  if (ctx.verbose) log(ctx) << "verdict: " << verdict << "\n";
  return kOk;
}

int cmd_hiatus(const Context& ctx) {
  const RunConfig& c = ctx.config;
  if (!c.hiatus.s0) throw ConfigError(c.source + ": hiatus.s0: required key missing");
  Curve curve = make_curve(c.curve);
  const double s0 = *c.hiatus.s0;

  std::vector<double> eps;
  bool zero_requested = false;
  for (double e : c.hiatus.eps) {
    if (e == 0.0)
      zero_requested = true;
    else
      eps.push_back(e);
  }
  if (c.hiatus.eps.empty()) eps = default_eps_grid(curve.length(), c.hiatus.eps_count);

  std::ostringstream csv;
  csv << csv_preamble(ctx, "hiatus");
  csv << "eps,branch,lambda,lambda_minus_lambdaL\n";
  ordered_json j;
  j["provenance"] = provenance(ctx, "hiatus");
  j["curve"] = curve_json(curve);
  j["alpha"] = c.alpha;
  j["s0"] = s0;
  int code = kOk;

  if (eps.empty()) {
    // Only the unperturbed spectrum was requested.
    if (!curve.closed() && !(s0 > 0.0 && s0 < curve.length()))
      throw DomainError("hiatus point must lie strictly inside (0, L)");
    QOperator op(make_basis(Domain::whole(curve), c.mesh), assembly_options(c));
    SpectrumResult r = find_bound_states(op, c.alpha, c.spectrum);
    for (const auto& st : r.states)
      for (int m = 0; m < st.multiplicity; ++m)
        csv << "0," << st.first_branch + m << "," << format_double(st.lambda) << ",0\n";
    j["eps"] = {0.0};
    j["branches"] = ordered_json::array();
    j["warnings"] = ordered_json::array();
    std::filesystem::create_directories(ctx.out);
    write_file(ctx.out / "hiatus_sweep.csv", csv.str());
    write_json(ctx.out / "hiatus_fit.json", j);
    return r.states.empty() ? kNoBoundStates : kOk;
  }

  SweepOptions so;
  so.eps = eps;
  so.mesh = c.mesh.mesh;
  so.assembly = assembly_options(c);
  so.spectrum = c.spectrum;
  so.states = c.hiatus.states;
  so.overlap_threshold = c.hiatus.overlap_threshold;
  if (ctx.verbose) log(ctx) << "sweeping " << eps.size() << " hiatus widths on " << curve.describe() << "\n";
  SweepResult sr = sweep(curve, c.alpha, s0, so);

  if (zero_requested)
    for (const auto& b : sr.branches)
      csv << "0," << sr.base.states[b.state].first_branch + b.member << "," << format_double(b.lambda_L) << ",0\n";
  for (std::size_t i = 0; i < sr.eps.size(); ++i)
    for (const auto& b : sr.branches) {
      int branch = sr.base.states[b.state].first_branch + b.member;
      csv << format_double(sr.eps[i]) << "," << branch << "," << format_double(b.lambda[i]) << ","
          << format_double(b.lambda[i] - b.lambda_L) << "\n";
    }

  j["eps"] = sr.eps;
  j["predictions"] = ordered_json::array();
  for (const auto& p : sr.predictions)
    j["predictions"].push_back({{"lambda_L", p.lambda_L},
                                {"kappa_L", p.kappa_L},
                                {"first_branch", p.first},
                                {"last_branch", p.last},
                                {"phi_s0", vec(p.phi_s0)},
                                {"gram", mat(p.gram)},
                                {"omega", mat(p.omega)},
                                {"C", mat(p.C)},
                                {"slopes", vec(p.slopes)},
                                {"member_slopes", vec(p.member_slopes)},
                                {"compression_slopes", vec(p.compression_slopes)}});
  j["branches"] = ordered_json::array();
  for (const auto& b : sr.branches) {
    ordered_json bj;
    bj["state"] = b.state;
    bj["member"] = b.member;
    bj["branch"] = sr.base.states[b.state].first_branch + b.member;
    bj["lambda_L"] = b.lambda_L;
    bj["predicted_slope"] = b.predicted_slope;
    bj["compression_slope"] = b.compression_slope;
    bj["fitted"] = b.fitted;
    if (b.fitted) {
      bj["fitted_slope"] = b.fitted_slope;
      bj["c1"] = b.fit.c1;
      bj["c2"] = b.fit.c2;
      bj["fit_residual"] = b.fit.residual;
      bj["fit_condition"] = b.fit.condition;
      bj["relative_error"] = num(b.relative_error);
      bj["compression_relative_error"] = num(b.compression_relative_error);
    }
    bj["sign_ok"] = b.sign_ok;
    bj["broken"] = b.broken;
    ordered_json ov = ordered_json::array();
    for (double o : b.overlap) ov.push_back(num(o));
    bj["overlap"] = ov;
    bj["note"] = b.note;
    j["branches"].push_back(bj);
    if (b.fit_failed) code = kFitFailure;
  }
  j["warnings"] = sr.warnings;
  std::filesystem::create_directories(ctx.out);
  write_file(ctx.out / "hiatus_sweep.csv", csv.str());
  write_json(ctx.out / "hiatus_fit.json", j);
  for (const auto& w : sr.warnings) log(ctx) << "warning: " << w << "\n";
  return code;
}

int cmd_regcheck(const Context& ctx) {
  const RunConfig& c = ctx.config;
  Curve curve = make_curve(c.curve);
  const double L = curve.length();
  std::vector<double> points = c.regcheck.points;
  if (points.empty())
    for (double f : {0.2, 0.35, 0.5, 0.65, 0.8}) points.push_back(f * L);
  std::vector<double> d = c.regcheck.d.empty() ? default_d_grid(curve) : c.regcheck.d;
  RegcheckReport rep = regcheck_suite(curve, c.regcheck.lambda, points, d, c.regcheck.normal_sign);

  std::ostringstream csv;
  csv << csv_preamble(ctx, "regcheck");
  csv << "family,f,s,d,value,extrapolated,error_estimate\n";
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows) {
    for (std::size_t i = 0; i < r.run.d.size(); ++i)
      csv << to_string(r.family) << "," << r.function << "," << format_double(r.s) << ","
          << format_double(r.run.d[i]) << "," << format_double(r.run.values[i]) << ","
          << format_double(r.run.limit.value) << "," << format_double(r.run.limit.error) << "\n";
    rows.push_back({{"family", to_string(r.family)},
                    {"f", r.function},
                    {"s", r.s},
                    {"direct", r.direct},
                    {"extrapolated", r.run.limit.value},
                    {"error_estimate", r.run.limit.error},
                    {"method", r.run.limit.method},
                    {"converged", r.run.limit.converged},
                    {"agrees", r.agrees},
                    {"counterterm_slope", r.run.counterterm_slope},
                    {"counterterm_target", r.run.counterterm_target},
                    {"counterterm_ok", r.run.counterterm_ok},
                    {"jacobian_constant", r.run.jacobian_constant}});
  }
  ordered_json cos = ordered_json::array();
  for (FamilyKind k : {FamilyKind::ParallelOffset, FamilyKind::Recess}) {
    ComparisonFamily fam;
    fam.kind = k;
    fam.normal_sign = c.regcheck.normal_sign;
    for (double s : points) {
      CosineExpansionReport ce = cosine_expansion_check(fam, curve, s, d);
      cos.push_back({{"family", to_string(k)},
                     {"s", s},
                     {"max_residual", ce.max_residual},
                     {"c_quadratic", ce.c_quadratic},
                     {"c_cubic", ce.c_cubic},
                     {"fit_residual", ce.fit_residual},
                     {"iota_constant", ce.iota_constant},
                     {"passed", ce.passed}});
    }
  }
  ordered_json j;
  j["provenance"] = provenance(ctx, "regcheck");
  j["curve"] = curve_json(curve);
  j["lambda"] = c.regcheck.lambda;
  j["d"] = d;
  j["direct_error"] = rep.direct_error;
  j["family_independent"] = rep.family_independent;
  j["all_agree"] = rep.all_agree;
  j["counterterms_ok"] = rep.counterterms_ok;
  j["rows"] = rows;
  j["cosine_expansion"] = cos;
  std::filesystem::create_directories(ctx.out);
  write_file(ctx.out / "regcheck.csv", csv.str());
  write_json(ctx.out / "regcheck.json", j);
  if (ctx.verbose)
    log(ctx) << "family independence " << (rep.family_independent ? "holds" : "FAILS") << ", agreement with direct "
             << (rep.all_agree ? "holds" : "FAILS") << "\n";
  return kOk;
}

int cmd_eigfun(const Context& ctx) {
  const RunConfig& c = ctx.config;
  Setup s = build(ctx);
  SpectrumResult r = find_bound_states(s.op, c.alpha, c.spectrum);
  if (r.states.empty()) {
    log(ctx) << "no bound states; nothing to evaluate\n";
    return kNoBoundStates;
  }
  if (c.eigfun.state >= int(r.states.size()))
    throw ConfigError(c.source + ": eigfun.state: only " + std::to_string(r.states.size()) + " bound state(s) found");
  const BoundState& st = r.states[c.eigfun.state];
  if (c.eigfun.member >= st.multiplicity)
    throw ConfigError(c.source + ": eigfun.member: state has multiplicity " + std::to_string(st.multiplicity));

  std::vector<Vec3> pts = c.eigfun.points;
  if (c.eigfun.n[0] > 0) {
    auto axis = [&](int a, int i) {
      return c.eigfun.n[a] == 1 ? c.eigfun.lo[a]
                                : c.eigfun.lo[a] + (c.eigfun.hi[a] - c.eigfun.lo[a]) * i / (c.eigfun.n[a] - 1);
    };
    for (int i = 0; i < c.eigfun.n[0]; ++i)
      for (int k = 0; k < c.eigfun.n[1]; ++k)
        for (int l = 0; l < c.eigfun.n[2]; ++l) pts.push_back(Vec3(axis(0, i), axis(1, k), axis(2, l)));
  }
  if (pts.empty()) throw ConfigError(c.source + ": eigfun: give either points or a lo/hi/n grid");

  const double L = s.curve.length();
  const int samples = 4096;
  std::ostringstream csv;
  csv << csv_preamble(ctx, "eigfun");
  csv << "# state=" << c.eigfun.state << " member=" << c.eigfun.member << " lambda=" << format_double(st.lambda)
      << "\n";
  csv << "x,y,z,psi\n";
  int skipped = 0, negative = 0, written = 0;
  for (const Vec3& x : pts) {
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) dist = std::min(dist, (x - s.curve.eval(L * i / samples)).norm());
    if (dist <= std::max(c.eigfun.exclude, 1e-9)) {
      ++skipped;
      continue;
    }
    double psi = psi_eval(st, x, c.eigfun.member);
    if (!(psi > 0.0)) ++negative;
    ++written;
    csv << format_double(x[0]) << "," << format_double(x[1]) << "," << format_double(x[2]) << ","
        << format_double(psi) << "\n";
  }
  std::filesystem::create_directories(ctx.out);
  write_file(ctx.out / "eigfun.csv", csv.str());
  if (ctx.verbose)
    log(ctx) << written << " points evaluated, " << skipped << " skipped near the curve, " << negative
             << " with psi <= 0\n";
  return kOk;
}

}  // namespace leakywire::cli
