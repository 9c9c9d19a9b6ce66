#include "leakywire/basis.hpp"

#include "leakywire/errors.hpp"

#include <cmath>
#include <numbers>

namespace leakywire {

Basis Basis::hat(PanelMesh mesh) {
  Basis b(std::move(mesh));
  b.kind_ = BasisKind::Hat;
  const auto& panels = b.mesh_.panels();
  int np = int(panels.size());
  b.active_.resize(np);
  if (b.domain().periodic()) {
    for (int k = 0; k < np; ++k) b.active_[k] = {k, (k + 1) % np};
    b.size_ = np;
    return b;
  }
  int node = 0;
  for (int k = 0; k < np; ++k) {
    if (k > 0 && panels[k].component != panels[k - 1].component) ++node;
    b.active_[k] = {node, node + 1};
    ++node;
  }
  b.size_ = node + 1;
  return b;
}

Basis Basis::trig(PanelMesh mesh, int harmonics) {
  if (!mesh.domain().periodic())
    throw ConfigError("trigonometric basis requires a closed curve without hiatus");
  if (harmonics < 0) throw ConfigError("number of harmonics must be nonnegative");
  Basis b(std::move(mesh));
  b.kind_ = BasisKind::Trig;
  b.harmonics_ = harmonics;
  b.size_ = 2 * harmonics + 1;
  std::vector<int> all(b.size_);
  for (int i = 0; i < b.size_; ++i) all[i] = i;
  b.active_.assign(b.mesh_.size(), all);
  return b;
}

void Basis::evaluate(int panel, double s, double* values) const {
  if (kind_ == BasisKind::Hat) {
    const Panel& p = mesh_.panels()[panel];
    double x = (s - p.lo) / (p.hi - p.lo);
    values[0] = 1.0 - x;
    values[1] = x;
    return;
  }
  double w = 2.0 * std::numbers::pi / domain().curve().length();
  values[0] = 1.0;
  for (int k = 1; k <= harmonics_; ++k) {
    values[2 * k - 1] = std::cos(w * k * s);
    values[2 * k] = std::sin(w * k * s);
  }
}

double Basis::value(int index, double s) const {
  if (kind_ == BasisKind::Trig) {
    if (index == 0) return 1.0;
    int k = (index + 1) / 2;
    double a = 2.0 * std::numbers::pi * k * s / domain().curve().length();
    return index % 2 == 1 ? std::cos(a) : std::sin(a);
  }
  double x = s;
  if (domain().periodic()) {
    double length = domain().curve().length();
    x = std::fmod(x, length);
    if (x < 0.0) x += length;
  }
  int p = mesh_.locate(x);
  if (p < 0) return 0.0;
  const auto& act = active_[p];
  double v[2];
  evaluate(p, x, v);
  if (act[0] == index) return v[0];
  if (act[1] == index) return v[1];
  return 0.0;
}

double Basis::combination(const Eigen::VectorXd& coeffs, double s) const {
  if (coeffs.size() != size_) throw ConfigError("coefficient vector size does not match basis");
  if (kind_ == BasisKind::Trig) {
    double total = 0.0;
    std::vector<double> v(size_);
    evaluate(0, s, v.data());
    for (int i = 0; i < size_; ++i) total += coeffs[i] * v[i];
    return total;
  }
  double x = s;
  if (domain().periodic()) {
    double length = domain().curve().length();
    x = std::fmod(x, length);
    if (x < 0.0) x += length;
  }
  int p = mesh_.locate(x);
  if (p < 0) return 0.0;
  double v[2];
  evaluate(p, x, v);
  const auto& act = active_[p];
  return coeffs[act[0]] * v[0] + coeffs[act[1]] * v[1];
}

}  // namespace leakywire
