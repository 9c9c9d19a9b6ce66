#pragma once

#include "leakywire/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace leakywire {

enum class BasisKind { Hat, Trig };

// Trial space on a panel mesh: continuous piecewise-linear hats, or the
// trigonometric system {1, cos(2 pi k s/L), sin(2 pi k s/L)}_{k <= K} on a loop.
class Basis {
 public:
  static Basis hat(PanelMesh mesh);
  static Basis trig(PanelMesh mesh, int harmonics);

  BasisKind kind() const { return kind_; }
  int size() const { return size_; }
  int harmonics() const { return harmonics_; }
  const PanelMesh& mesh() const { return mesh_; }
  const Domain& domain() const { return mesh_.domain(); }

  // Global indices of the functions that do not vanish on a panel.
  const std::vector<int>& active(int panel) const { return active_[panel]; }
  // Values of the active functions of a panel at s (s inside the panel).
  void evaluate(int panel, double s, double* values) const;
  // e_index(s); zero outside the domain.
  double value(int index, double s) const;
  // sum_i coeffs_i e_i(s)
  double combination(const Eigen::VectorXd& coeffs, double s) const;

 private:
  Basis(PanelMesh mesh) : mesh_(std::move(mesh)) {}

  BasisKind kind_ = BasisKind::Hat;
  PanelMesh mesh_;
  int size_ = 0;
  int harmonics_ = 0;
  std::vector<std::vector<int>> active_;
};

}  // namespace leakywire
