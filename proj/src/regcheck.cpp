#include "leakywire/regcheck.hpp"

#include "leakywire/errors.hpp"
#include "leakywire/kernels.hpp"
#include "leakywire/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace leakywire {

namespace {

constexpr double kPi = std::numbers::pi;

double hat(double x, double peak, double half) { return std::max(0.0, 1.0 - std::abs(x - peak) / half); }

double wrap(double t, double L) {
  double r = std::fmod(t, L);
  return r < 0.0 ? r + L : r;
}

double smallest_radius(const Curve& curve) {
  double kmax = 0.0;
  const int n = 256;
  for (int i = 0; i <= n; ++i) kmax = std::max(kmax, curve.curvature(curve.length() * i / n));
  return kmax > 0.0 ? 1.0 / kmax : std::numeric_limits<double>::infinity();
}

// Offsets u = t - s covering the curve once.
std::pair<double, double> offset_range(const Curve& curve, double s) {
  if (curve.closed()) return {-0.5 * curve.length(), 0.5 * curve.length()};
  return {-s, curve.length() - s};
}

std::vector<double> kink_offsets(const Curve& curve, const TestFunction& f, double s) {
  std::vector<double> out;
  for (double k : f.kinks) out.push_back(curve.closed() ? std::remainder(k - s, curve.length()) : k - s);
  return out;
}

template <class F>
double integrate_offsets(double ulo, double uhi, std::vector<double> cuts, double finest, int order,
                         double max_piece, F&& g) {
  cuts.push_back(0.0);
  cuts.push_back(ulo);
  cuts.push_back(uhi);
  std::vector<double> pts;
  for (double c : cuts)
    if (c >= ulo && c <= uhi) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            pts.end());
  std::vector<LinePoint> rule;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    int sub = std::max(1, int(std::ceil((b - a) / max_piece)));
    for (int j = 0; j < sub; ++j) {
      double lo = a + (b - a) * j / sub, hi = a + (b - a) * (j + 1) / sub;
      rule.clear();
      graded_line_rule(lo, hi, 0.0, finest, order, rule);
      for (const auto& p : rule) total += p.w * g(p.s);
    }
  }
  return total;
}

double direct_value(const Curve& curve, double kappa, const TestFunction& f, double s, int order,
                    double finest_fraction) {
  const double L = curve.length();
  auto [ulo, uhi] = offset_range(curve, s);
  const double fs = f.f(s);
  double integral = integrate_offsets(
      ulo, uhi, kink_offsets(curve, f, s), finest_fraction * L, order, L / 16.0, [&](double u) {
        double t = curve.closed() ? wrap(s + u, L) : s + u;
        double ft = f.f(t);
        double p = std::abs(u);
        double c = curve.chord_offset(s, u);
        return (ft - fs) / (4.0 * kPi * p) + (green_smooth(kappa, c) + curvature_kernel(c, p)) * ft;
      });
  return integral + diagonal_log(Domain::whole(curve), s) * fs;
}

void check_interior(const Curve& curve, double s) {
  if (curve.closed()) {
    if (!(s >= 0.0 && s <= curve.length())) throw DomainError("evaluation point outside [0, L]");
  } else if (!(s > 0.0 && s < curve.length())) {
    throw DomainError("evaluation point must be interior");
  }
}

}  // namespace

std::string to_string(FamilyKind kind) { return kind == FamilyKind::Recess ? "recess" : "parallel_offset"; }

std::vector<TestFunction> test_dictionary(double L) {
  const double w = 2.0 * kPi / L;
  return {
      {"one", [](double) { return 1.0; }, {}},
      {"cos1", [w](double s) { return std::cos(w * s); }, {}},
      {"sin1", [w](double s) { return std::sin(w * s); }, {}},
      {"cos2", [w](double s) { return std::cos(2.0 * w * s); }, {}},
      {"hat_half", [L](double s) { return hat(s, 0.5 * L, 0.25 * L); }, {0.25 * L, 0.5 * L, 0.75 * L}},
      {"hat_third", [L](double s) { return hat(s, L / 3.0, L / 6.0); }, {L / 6.0, L / 3.0, 0.5 * L}},
  };
}

TestFunction test_function(const std::string& name, double length) {
  for (auto& f : test_dictionary(length))
    if (f.name == name) return f;
  throw ConfigError("unknown test function '" + name + "'");
}

double q_apply_direct(const Curve& curve, double lambda, const TestFunction& f, double s) {
  check_interior(curve, s);
  return direct_value(curve, SpectralParameter::from_lambda(lambda).kappa(), f, s, 16, 1e-6);
}

std::vector<double> default_d_grid(const Curve& curve) {
  double top = 1e-2 * std::min({1.0, 0.5 * curve.length(), smallest_radius(curve)});
  std::vector<double> d(8);
  for (int i = 0; i < 8; ++i) d[i] = top * std::pow(1e-2, i / 7.0);
  return d;
}

RegularizationRun q_apply_via_family(const Curve& curve, double lambda, const ComparisonFamily& family,
                                     const TestFunction& f, double s, const std::vector<double>& d_grid) {
  check_interior(curve, s);
  if (d_grid.size() < 4) throw ConfigError("d grid needs at least four points");
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    if (!(d_grid[i] > 0.0)) throw ConfigError("d grid must be positive");
    if (i > 0 && !(d_grid[i] < d_grid[i - 1])) throw ConfigError("d grid must be decreasing");
    if (i > 1) {
      double r0 = d_grid[i - 1] / d_grid[i - 2], r1 = d_grid[i] / d_grid[i - 1];
      if (std::abs(r1 - r0) > 1e-6 * r0) throw ConfigError("d grid must be geometric");
    }
  }
  if (d_grid.front() > 0.1 * smallest_radius(curve))
    throw ConfigError("largest d must be small against the curvature radius");

  const double kappa = SpectralParameter::from_lambda(lambda).kappa();
  const double L = curve.length();
  const double rho = family.width(curve);
  auto [ulo, uhi] = offset_range(curve, s);
  std::vector<double> cuts = kink_offsets(curve, f, s);
  if (family.kind == FamilyKind::Recess) {
    cuts.push_back(-rho);
    cuts.push_back(rho);
  }
  const double fs = f.f(s);

  RegularizationRun run;
  run.family = family;
  run.function = f.name;
  run.s = s;
  run.d = d_grid;
  for (double d : d_grid) {
    double raw = integrate_offsets(ulo, uhi, cuts, d / 8.0, 16, L / 16.0, [&](double u) {
      double t = s + u;
      double a = d * family.normal_sign;
      double j = 1.0;
      if (family.kind == FamilyKind::Recess) {
        a *= recess_bump(u / rho);
        j = comparison_jacobian(family, curve, t, d, s);
      }
      Vec3 r = -curve.displacement(s, u) - a * curve.normal(t);
      return green(kappa, r.norm()) * j * f.f(curve.closed() ? wrap(t, L) : t);
    });
    run.raw.push_back(raw);
    run.values.push_back(raw + fs * std::log(d) / (2.0 * kPi));

    double jdev = 0.0;
    const int n = 200;
    double span = family.kind == FamilyKind::Recess ? rho : 0.5 * std::min(uhi - ulo, L);
    for (int i = 0; i <= n; ++i) {
      double t = s - span + 2.0 * span * i / n;
      if (!curve.closed() && (t < 0.0 || t > L)) continue;
      jdev = std::max(jdev, std::abs(comparison_jacobian(family, curve, t, d, s) - 1.0));
    }
    run.jacobian_constant = std::max(run.jacobian_constant, jdev / d);
  }
  run.limit = extrapolate_to_zero(run.d, run.values);
  double scale = 1.0;
  for (double r : run.raw) scale = std::max(scale, std::abs(r));
  run.limit.error += 1e-13 * scale;

  Eigen::MatrixXd A(run.d.size(), 2);
  Eigen::VectorXd y(run.d.size());
  for (std::size_t i = 0; i < run.d.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(run.d[i]);
    y(i) = run.raw[i];
  }
  run.counterterm_slope = least_squares(A, y).coeffs(1);
  run.counterterm_target = -fs / (2.0 * kPi);
  double tol = 0.05 * std::max(std::abs(run.counterterm_target), 0.1 / (2.0 * kPi));
  run.counterterm_ok = std::abs(run.counterterm_slope - run.counterterm_target) <= tol;
  return run;
}

CosineExpansionReport cosine_expansion_check(const ComparisonFamily& family, const Curve& curve, double s,
                                             const std::vector<double>& d_grid) {
  check_interior(curve, s);
  if (d_grid.size() < 2) throw ConfigError("cosine expansion check needs at least two d values");
  const double rho = family.width(curve);
  const double hmax = 0.05 * std::min({1.0, 0.25 * curve.length(), smallest_radius(curve), rho});
  std::vector<double> hs;
  for (int k = 0; k < 8; ++k) {
    double h = hmax * std::pow(0.5, k);
    for (double sg : {-1.0, 1.0})
      if (curve.closed() || (s + sg * h > 0.0 && s + sg * h < curve.length())) hs.push_back(sg * h);
  }
  const int rows = int(hs.size() * d_grid.size());
  Eigen::MatrixXd A(rows, 6);
  Eigen::VectorXd r(rows);
  CosineExpansionReport rep;
  int row = 0;
  for (double d : d_grid)
    for (double h : hs) {
      double t = s + h;
      double a = d * family.normal_sign;
      if (family.kind == FamilyKind::Recess) a *= recess_bump(h / rho);
      Vec3 diff = -curve.displacement(s, h);
      Vec3 n = curve.normal(t);
      Vec3 v = diff - a * n;
      double res = (v.squaredNorm() - h * h) - d * d;
      r(row) = res;
      A.row(row) << h * h * d, h * h * h * d, h * h * h * h, h * h * d * d, h * h * h * h * d, h * h * h * h * h;
      rep.max_residual = std::max(rep.max_residual, std::abs(res));
      double iota = 2.0 * a * diff.dot(n);
      rep.iota_constant = std::max(rep.iota_constant, std::abs(iota) / (h * h * d));
      ++row;
    }
  double scale = hmax * hmax;
  if (rep.max_residual <= 1e-14 * std::max(1.0, scale)) {
    rep.passed = true;
    return rep;
  }
  LeastSquaresFit fit = least_squares(A, r);
  rep.c_quadratic = fit.coeffs(0);
  rep.c_cubic = fit.coeffs(1);
  rep.fit_residual = fit.residual / r.norm();
  rep.passed = rep.fit_residual <= 1e-3 && std::isfinite(rep.c_cubic) && std::isfinite(rep.iota_constant);
  return rep;
}

RegcheckReport regcheck_suite(const Curve& curve, double lambda, const std::vector<double>& points,
                              const std::vector<double>& d_grid, double normal_sign) {
  const double kappa = SpectralParameter::from_lambda(lambda).kappa();
  RegcheckReport rep;
  auto dict = test_dictionary(curve.length());
  for (const auto& f : dict)
    for (double s : points) {
      check_interior(curve, s);
      double direct = direct_value(curve, kappa, f, s, 16, 1e-6);
      double check = direct_value(curve, kappa, f, s, 24, 1e-8);
      double derr = std::abs(direct - check) + 1e-13 * std::max(1.0, std::abs(direct));
      rep.direct_error = std::max(rep.direct_error, derr);
      std::size_t first = rep.rows.size();
      for (FamilyKind kind : {FamilyKind::ParallelOffset, FamilyKind::Recess}) {
        ComparisonFamily fam;
        fam.kind = kind;
        fam.normal_sign = normal_sign;
        RegcheckRow row{kind, f.name, s, direct, q_apply_via_family(curve, lambda, fam, f, s, d_grid), false};
        row.agrees = row.run.limit.converged &&
                     std::abs(row.run.limit.value - direct) <= row.run.limit.error + derr;
        rep.all_agree = rep.all_agree && row.agrees;
        rep.counterterms_ok = rep.counterterms_ok && row.run.counterterm_ok;
        rep.rows.push_back(std::move(row));
      }
      const auto& a = rep.rows[first].run.limit;
      const auto& b = rep.rows[first + 1].run.limit;
      if (std::abs(a.value - b.value) > a.error + b.error) rep.family_independent = false;
    }
  return rep;
}

}  // namespace leakywire
