#pragma once

#include "leakywire/geometry.hpp"

#include <vector>

namespace leakywire {

// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

struct MeshOptions {
  int panels = 64;             // base panels over the whole domain
  int order = 8;               // Gauss order per panel
  double grading_ratio = 0.15;
  int grading_levels = 10;     // 0 disables endpoint grading
};

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  int component = 0;
  double length() const { return hi - lo; }
};

class PanelMesh {
 public:
  PanelMesh(Domain domain, std::vector<Panel> panels, MeshOptions options);

  const Domain& domain() const { return domain_; }
  const std::vector<Panel>& panels() const { return panels_; }
  const MeshOptions& options() const { return options_; }
  int order() const { return options_.order; }
  int size() const { return int(panels_.size()); }
  // Panel breakpoints of one component, increasing.
  std::vector<double> breakpoints(int component) const;
  // Panel containing s (closed to the left); -1 when s is outside the domain.
  int locate(double s) const;
  // Every panel bisected; spans a superset of the hat space.
  PanelMesh refined() const;
  // Smallest panel touching the point x (component endpoints).
  double smallest_panel_at(double x) const;

 private:
  Domain domain_;
  std::vector<Panel> panels_;
  MeshOptions options_;
};

PanelMesh build_mesh(const Domain& domain, const MeshOptions& options);

// Quadrature point of a panel pair.  u is the geometric parameter offset t - s
// (reduced to [-L/2, L/2] on closed curves), pu the offset t - s in the
// domain parametrization.
struct PairPoint {
  double s, t, u, pu, w;
};

// Quadrature for integrals over P x Q that resolves the diagonal, shared vertices
// and near neighbours (including neighbours across the seam or a hiatus gap).
class PairQuadrature {
 public:
  explicit PairQuadrature(const PanelMesh& mesh);
  void generate(int p, int q, std::vector<PairPoint>& out) const;

 private:
  struct Span {
    double a, b;
  };
  void recurse(Span I, Span J, double shift, bool same, std::vector<PairPoint>& out) const;
  bool split_at_antipode(Span I, Span J, double shift, std::vector<PairPoint>& out) const;
  void antipodal_rule(Span I, Span J, double shift, std::vector<PairPoint>& out) const;
  void self_rule(Span I, std::vector<PairPoint>& out) const;
  void duffy_rule(Span I, Span J, double shift, std::vector<PairPoint>& out) const;
  void tensor_rule(Span I, Span J, double shift, std::vector<PairPoint>& out) const;

  const PanelMesh* mesh_;
  const GaussRule* rule_;
  double period_;
  bool periodic_;
};

struct LinePoint {
  double s, w;
};

// Rule for a panel whose integrand has log singularities at the listed points
// (typically component endpoints); the panel is refined geometrically toward
// any singular point closer than its own length.
void log_panel_rule(double lo, double hi, const std::vector<double>& singular, int order,
                    std::vector<LinePoint>& out);

// Composite Gauss rule on [lo, hi] graded geometrically toward x (which may lie
// inside or outside the interval); used for near-singular line integrals.
void graded_line_rule(double lo, double hi, double x, double finest, int order,
                      std::vector<LinePoint>& out);

class Basis;

// Element integrals for two basis functions (brute-force friendly reference paths).
// Symmetrized singular form: double integral of (e_m(s)-e_m(t))(e_n(s)-e_n(t)) / p.
double singular_form_element(const Basis& basis, int m, int n, bool periodic_distance = true);

using PairKernel = std::function<double(double s, double t, double u)>;
// Double integral of K(s, t) e_m(s) e_n(t); K receives the geometric offset u too.
double smooth_form_element(const Basis& basis, const PairKernel& kernel, int m, int n);

}  // namespace leakywire
