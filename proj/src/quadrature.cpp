#include "leakywire/quadrature.hpp"

#include "leakywire/basis.hpp"
#include "leakywire/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace leakywire {

namespace {

GaussRule compute_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = 0.5 * (1.0 - x);
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = r.weights[n - 1 - i] = 0.5 * w;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw ConfigError("Gauss order must lie in [1, 64]");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss(order));
  return *slot;
}

PanelMesh::PanelMesh(Domain domain, std::vector<Panel> panels, MeshOptions options)
    : domain_(std::move(domain)), panels_(std::move(panels)), options_(options) {}

std::vector<double> PanelMesh::breakpoints(int component) const {
  std::vector<double> b;
  for (const auto& p : panels_) {
    if (p.component != component) continue;
    if (b.empty()) b.push_back(p.lo);
    b.push_back(p.hi);
  }
  return b;
}

int PanelMesh::locate(double s) const {
  auto it = std::upper_bound(panels_.begin(), panels_.end(), s,
                             [](double x, const Panel& p) { return x < p.lo; });
  if (it == panels_.begin()) return -1;
  int i = int(it - panels_.begin()) - 1;
  if (s <= panels_[i].hi) return i;
  return -1;
}

PanelMesh PanelMesh::refined() const {
  std::vector<Panel> out;
  out.reserve(2 * panels_.size());
  for (const auto& p : panels_) {
    double m = 0.5 * (p.lo + p.hi);
    out.push_back({p.lo, m, p.component});
    out.push_back({m, p.hi, p.component});
  }
  MeshOptions o = options_;
  o.panels *= 2;
  return PanelMesh(domain_, std::move(out), o);
}

double PanelMesh::smallest_panel_at(double x) const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& p : panels_)
    if (p.lo == x || p.hi == x) h = std::min(h, p.length());
  return h;
}

PanelMesh build_mesh(const Domain& domain, const MeshOptions& options) {
  if (options.order < 1) throw ConfigError("quadrature order must be positive");
  if (!(options.grading_ratio > 0.0 && options.grading_ratio < 1.0))
    throw ConfigError("grading ratio must lie in (0, 1)");
  if (options.grading_levels < 0) throw ConfigError("grading levels must be nonnegative");
  const auto& comps = domain.components();
  double total = domain.measure();
  std::vector<Panel> panels;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    double a = comps[c].lo, b = comps[c].hi;
    if (!(b - a >= 1e-12)) throw ConfigError("degenerate component (length < 1e-12)");
    int n = int(std::lround(options.panels * (b - a) / total));
    n = std::max(n, 2);
    if (domain.periodic()) {
      if (options.panels < 2) throw ConfigError("at least 2 panels required");
      n = options.panels;
    }
    double h = (b - a) / n;
    std::vector<double> x;
    auto grade = [&](double from, double dir) {
      // Nodes from + dir h r^j, j = J..1, listed away from the endpoint.
      for (int j = options.grading_levels; j >= 1; --j)
        x.push_back(from + dir * h * std::pow(options.grading_ratio, j));
    };
    bool graded = !domain.periodic() && options.grading_levels > 0;
    x.push_back(a);
    if (graded) grade(a, 1.0);
    for (int i = 1; i < n; ++i) x.push_back(a + (b - a) * double(i) / n);
    if (graded) {
      std::vector<double> tail;
      for (int j = 1; j <= options.grading_levels; ++j)
        tail.push_back(b - h * std::pow(options.grading_ratio, j));
      x.insert(x.end(), tail.begin(), tail.end());
    }
    x.push_back(b);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) panels.push_back({x[i], x[i + 1], int(c)});
  }
  return PanelMesh(domain, std::move(panels), options);
}

PairQuadrature::PairQuadrature(const PanelMesh& mesh)
    : mesh_(&mesh), rule_(&gauss_legendre(mesh.order())),
      period_(mesh.domain().curve().closed() ? mesh.domain().curve().length() : 0.0),
      periodic_(mesh.domain().periodic()) {}

void PairQuadrature::generate(int p, int q, std::vector<PairPoint>& out) const {
  const Panel& P = mesh_->panels()[p];
  const Panel& Q = mesh_->panels()[q];
  Span I{P.lo, P.hi};
  if (p == q) {
    recurse(I, I, 0.0, true, out);
    return;
  }
  double shift = 0.0;
  if (period_ > 0.0) {
    auto gap = [&](double sh) { return std::max(Q.lo + sh - P.hi, P.lo - (Q.hi + sh)); };
    double best = gap(0.0);
    for (double sh : {-period_, period_}) {
      double g = gap(sh);
      if (g < best) {
        best = g;
        shift = sh;
      }
    }
  }
  std::size_t first = out.size();
  recurse(I, Span{Q.lo + shift, Q.hi + shift}, shift, false, out);
  if (period_ > 0.0)
    for (std::size_t k = first; k < out.size(); ++k) out[k].u -= period_ * std::round(out[k].u / period_);
}

void PairQuadrature::recurse(Span I, Span J, double shift, bool same,
                             std::vector<PairPoint>& out) const {
  if (same) {
    self_rule(I, out);
    return;
  }
  if (periodic_ && split_at_antipode(I, J, shift, out)) return;
  double hI = I.b - I.a, hJ = J.b - J.a;
  bool right = J.a == I.b;
  bool left = J.b == I.a;
  if (right || left) {
    constexpr double kRatio = 1.0 + 1e-9;
    if (hI > kRatio * hJ) {
      if (right) {
        double c = I.b - hJ;
        recurse(Span{c, I.b}, J, shift, false, out);
        recurse(Span{I.a, c}, J, shift, false, out);
      } else {
        double c = I.a + hJ;
        recurse(Span{I.a, c}, J, shift, false, out);
        recurse(Span{c, I.b}, J, shift, false, out);
      }
      return;
    }
    if (hJ > kRatio * hI) {
      if (right) {
        double c = J.a + hI;
        recurse(I, Span{J.a, c}, shift, false, out);
        recurse(I, Span{c, J.b}, shift, false, out);
      } else {
        double c = J.b - hI;
        recurse(I, Span{c, J.b}, shift, false, out);
        recurse(I, Span{J.a, c}, shift, false, out);
      }
      return;
    }
    duffy_rule(I, J, shift, out);
    return;
  }
  double gap = std::max(J.a - I.b, I.a - J.b);
  if (gap < std::max(hI, hJ)) {
    if (hI >= hJ) {
      double m = 0.5 * (I.a + I.b);
      recurse(Span{I.a, m}, J, shift, false, out);
      recurse(Span{m, I.b}, J, shift, false, out);
    } else {
      double m = 0.5 * (J.a + J.b);
      recurse(I, Span{J.a, m}, shift, false, out);
      recurse(I, Span{m, J.b}, shift, false, out);
    }
    return;
  }
  tensor_rule(I, J, shift, out);
}

bool PairQuadrature::split_at_antipode(Span I, Span J, double shift, std::vector<PairPoint>& out) const {
  const double tol = 1e-12 * period_;
  for (double us : {0.5 * period_, -0.5 * period_}) {
    if (!(us > J.a - I.b + tol && us < J.b - I.a - tol)) continue;
    for (double x : {J.a - us, J.b - us})
      if (x > I.a + tol && x < I.b - tol) {
        recurse(Span{I.a, x}, J, shift, false, out);
        recurse(Span{x, I.b}, J, shift, false, out);
        return true;
      }
    for (double y : {I.a + us, I.b + us})
      if (y > J.a + tol && y < J.b - tol) {
        recurse(I, Span{J.a, y}, shift, false, out);
        recurse(I, Span{y, J.b}, shift, false, out);
        return true;
      }
    antipodal_rule(I, J, shift, out);
    return true;
  }
  return false;
}

// Square block whose diagonal t - s = +-L/2 carries the kink of the periodic distance.
void PairQuadrature::antipodal_rule(Span I, Span J, double shift, std::vector<PairPoint>& out) const {
  const auto& g = *rule_;
  double h = I.b - I.a;
  int n = int(g.nodes.size());
  auto emit = [&](double s, double tu, double w) {
    double t = tu - shift;
    double u = tu - s;
    out.push_back({s, t, u, shift == 0.0 ? u : t - s, w});
  };
  for (int i = 0; i < n; ++i) {
    double v = h * g.nodes[i];
    double rest = h - v;
    for (int j = 0; j < n; ++j) {
      double a = rest * g.nodes[j];
      double w = h * rest * g.weights[i] * g.weights[j];
      emit(I.a + a + v, J.a + a, w);
      emit(I.a + a, J.a + a + v, w);
    }
  }
}

void PairQuadrature::self_rule(Span I, std::vector<PairPoint>& out) const {
  const auto& g = *rule_;
  double h = I.b - I.a;
  int n = int(g.nodes.size());
  for (int i = 0; i < n; ++i) {
    double u = h * g.nodes[i];
    double rest = h - u;
    for (int j = 0; j < n; ++j) {
      double t0 = I.a + rest * g.nodes[j];
      double w = h * rest * g.weights[i] * g.weights[j];
      out.push_back({t0 + u, t0, -u, -u, w});
      out.push_back({t0, t0 + u, u, u, w});
    }
  }
}

void PairQuadrature::duffy_rule(Span I, Span J, double shift, std::vector<PairPoint>& out) const {
  const auto& g = *rule_;
  double hI = I.b - I.a, hJ = J.b - J.a;
  bool right = J.a == I.b;
  double v = right ? I.b : I.a;
  double sgn = right ? 1.0 : -1.0;
  int n = int(g.nodes.size());
  auto emit = [&](double sigma, double tau, double w) {
    double s = v - sgn * sigma;
    double tu = v + sgn * tau;
    double u = sgn * (sigma + tau);
    double t = tu - shift;
    double pu = shift == 0.0 ? u : t - s;
    out.push_back({s, t, u, pu, w});
  };
  for (int i = 0; i < n; ++i) {
    double x = g.nodes[i];
    for (int j = 0; j < n; ++j) {
      double y = g.nodes[j];
      double w = hI * hJ * x * g.weights[i] * g.weights[j];
      emit(hI * x, hJ * x * y, w);
      emit(hI * x * y, hJ * x, w);
    }
  }
}

void PairQuadrature::tensor_rule(Span I, Span J, double shift, std::vector<PairPoint>& out) const {
  const auto& g = *rule_;
  double hI = I.b - I.a, hJ = J.b - J.a;
  double d0 = J.a - I.a;
  int n = int(g.nodes.size());
  for (int i = 0; i < n; ++i) {
    double s = I.a + hI * g.nodes[i];
    for (int j = 0; j < n; ++j) {
      double tu = J.a + hJ * g.nodes[j];
      double u = d0 + (hJ * g.nodes[j] - hI * g.nodes[i]);
      double t = tu - shift;
      double pu = shift == 0.0 ? u : t - s;
      out.push_back({s, t, u, pu, hI * hJ * g.weights[i] * g.weights[j]});
    }
  }
}

namespace {

void gauss_on(double lo, double hi, const GaussRule& g, std::vector<LinePoint>& out) {
  double h = hi - lo;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) out.push_back({lo + h * g.nodes[i], h * g.weights[i]});
}

void log_recurse(double lo, double hi, const std::vector<double>& singular, double floor,
                 const GaussRule& g, std::vector<LinePoint>& out) {
  double h = hi - lo;
  double dist = std::numeric_limits<double>::infinity();
  double target = 0.0;
  for (double x : singular) {
    double d = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
    if (d < dist) {
      dist = d;
      target = x;
    }
  }
  if (dist >= h) {
    gauss_on(lo, hi, g, out);
    return;
  }
  if (h <= floor) {
    // Remaining piece contributes O(h ln h) to a log-singular integrand.
    if (dist > 0.0) gauss_on(lo, hi, g, out);
    return;
  }
  double m = 0.5 * (lo + hi);
  if (m <= lo || m >= hi) return;
  if (target <= m) {
    log_recurse(lo, m, singular, floor, g, out);
    log_recurse(m, hi, singular, floor, g, out);
  } else {
    log_recurse(m, hi, singular, floor, g, out);
    log_recurse(lo, m, singular, floor, g, out);
  }
}

}  // namespace

void log_panel_rule(double lo, double hi, const std::vector<double>& singular, int order,
                    std::vector<LinePoint>& out) {
  const auto& g = gauss_legendre(order);
  double scale = std::max(std::abs(lo), std::abs(hi));
  double floor = std::max(1e-16 * (hi - lo), 64.0 * std::numeric_limits<double>::epsilon() * scale);
  log_recurse(lo, hi, singular, floor, g, out);
}

void graded_line_rule(double lo, double hi, double x, double finest, int order,
                      std::vector<LinePoint>& out) {
  const auto& g = gauss_legendre(order);
  if (!(finest > 0.0)) throw DomainError("graded_line_rule: finest panel must be positive");
  auto side = [&](double from, double to) {
    // Pieces grow geometrically away from 'from'.
    double dir = to > from ? 1.0 : -1.0;
    double len = std::abs(to - from);
    double pos = 0.0, step = finest;
    while (pos < len) {
      double next = std::min(len, pos + step);
      if (len - next < 0.5 * step) next = len;
      double a = from + dir * pos, b = from + dir * next;
      gauss_on(std::min(a, b), std::max(a, b), g, out);
      pos = next;
      step = std::max(step, pos);
    }
  };
  if (x <= lo) {
    double d = lo - x;
    if (d >= hi - lo) {
      gauss_on(lo, hi, g, out);
      return;
    }
    side(lo, hi);
  } else if (x >= hi) {
    double d = x - hi;
    if (d >= hi - lo) {
      gauss_on(lo, hi, g, out);
      return;
    }
    side(hi, lo);
  } else {
    side(x, lo);
    side(x, hi);
  }
}

double singular_form_element(const Basis& basis, int m, int n, bool periodic_distance) {
  const PanelMesh& mesh = basis.mesh();
  PairQuadrature pq(mesh);
  std::vector<PairPoint> pts;
  double total = 0.0;
  for (int p = 0; p < mesh.size(); ++p) {
    for (int q = 0; q < mesh.size(); ++q) {
      pts.clear();
      pq.generate(p, q, pts);
      for (const auto& x : pts) {
        double dist = periodic_distance && mesh.domain().periodic() ? std::abs(x.u) : std::abs(x.pu);
        double fm = basis.value(m, x.s) - basis.value(m, x.t);
        double fn = basis.value(n, x.s) - basis.value(n, x.t);
        if (dist > 0.0) total += x.w * fm * fn / dist;
      }
    }
  }
  return total;
}

double smooth_form_element(const Basis& basis, const PairKernel& kernel, int m, int n) {
  const PanelMesh& mesh = basis.mesh();
  PairQuadrature pq(mesh);
  std::vector<PairPoint> pts;
  double total = 0.0;
  for (int p = 0; p < mesh.size(); ++p) {
    for (int q = 0; q < mesh.size(); ++q) {
      pts.clear();
      pq.generate(p, q, pts);
      for (const auto& x : pts) total += x.w * kernel(x.s, x.t, x.u) * basis.value(m, x.s) * basis.value(n, x.t);
    }
  }
  return total;
}

}  // namespace leakywire
