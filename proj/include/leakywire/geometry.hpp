#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace leakywire {

using Vec3 = Eigen::Vector3d;

enum class CurveKind { Segment, CircleLoop, CircularArc, FourierLoop };

std::string to_string(CurveKind kind);

// gamma(s) = mean + sum_k cos_terms[k-1] cos(2 pi k s / L) + sin_terms[k-1] sin(2 pi k s / L)
struct FourierCoefficients {
  Vec3 mean = Vec3::Zero();
  std::vector<Vec3> cos_terms;
  std::vector<Vec3> sin_terms;
};

// Arc-length parametrized curve. Immutable after construction.
class Curve {
 public:
  static Curve segment(double length, const Vec3& origin = Vec3::Zero(),
                       const Vec3& direction = Vec3::UnitX(), const Vec3& normal = Vec3::UnitZ());
  static Curve circle(double length, const Vec3& center = Vec3::Zero(),
                      const Vec3& e1 = Vec3::UnitX(), const Vec3& e2 = Vec3::UnitY());
  static Curve arc(double radius, double angle, const Vec3& center = Vec3::Zero(),
                   const Vec3& e1 = Vec3::UnitX(), const Vec3& e2 = Vec3::UnitY());
  // Rejects coefficient sets whose speed deviates from 1 by more than speed_tol.
  static Curve fourier(double length, FourierCoefficients coeffs, double speed_tol = 1e-6);

  CurveKind kind() const { return kind_; }
  double length() const { return length_; }
  bool closed() const { return kind_ == CurveKind::CircleLoop || kind_ == CurveKind::FourierLoop; }
  double radius() const { return radius_; }
  const FourierCoefficients& fourier_coefficients() const { return fourier_; }
  std::string describe() const;

  // Checked accessors, 0 <= s <= L.
  Vec3 point(double s) const;
  double chord(double s, double t) const;
  double param_distance(double s, double t) const;

  // Unchecked evaluation; closed curves accept any real s (periodic extension),
  // open curves use the analytic continuation of their formula.
  Vec3 eval(double s) const;
  Vec3 tangent(double s) const;
  Vec3 acceleration(double s) const;
  // gamma(s + u) - gamma(s), accurate for small |u|.
  Vec3 displacement(double s, double u) const;
  double chord_offset(double s, double u) const { return displacement(s, u).norm(); }

  double curvature(double s) const { return acceleration(s).norm(); }
  // Normal field used by the comparison families (principal normal, the stored
  // normal for segments, rotation-minimizing frame for Fourier loops).
  Vec3 normal(double s) const;
  // Largest | |gamma'| - 1 | on a uniform grid.
  double speed_deviation(int samples = 2048) const;

 private:
  Curve() = default;
  void build_frame();

  CurveKind kind_ = CurveKind::Segment;
  double length_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
  Vec3 dir_ = Vec3::UnitX();
  Vec3 nrm_ = Vec3::UnitZ();
  Vec3 e1_ = Vec3::UnitX();
  Vec3 e2_ = Vec3::UnitY();
  double radius_ = 0.0;
  FourierCoefficients fourier_;
  std::vector<Vec3> frame_;  // rotation-minimizing normals on a uniform grid (Fourier loops)
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// Parameter set carrying the interaction: a list of disjoint intervals on a curve,
// or the whole closed curve (periodic).
class Domain {
 public:
  static Domain whole(const Curve& curve);
  static Domain intervals(const Curve& curve, std::vector<Interval> components);

  const Curve& curve() const { return curve_; }
  const std::vector<Interval>& components() const { return components_; }
  bool periodic() const { return periodic_; }
  double measure() const;
  // Index of the component containing s in its interior, -1 otherwise.
  int component_of(double s) const;

 private:
  Curve curve_ = Curve::segment(1.0);
  std::vector<Interval> components_;
  bool periodic_ = false;
};

// Curve with the arc (s0 - eps, s0 + eps) removed.
class HiatusCurve {
 public:
  HiatusCurve(Curve base, double s0, double epsilon);
  const Curve& base() const { return base_; }
  double s0() const { return s0_; }
  double epsilon() const { return epsilon_; }
  // eps = 0 gives the unperturbed domain.
  Domain domain() const;

 private:
  Curve base_;
  double s0_;
  double epsilon_;
};

struct RegularityWitness {
  double c = 1.0;
  double mu = 2.0;
};

struct RegularityViolation {
  double s, t, margin;
};

struct RegularityReport {
  bool passed = true;
  double worst_margin = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
  std::size_t pairs_checked = 0;
  std::vector<RegularityViolation> violations;
};

using CurveFunction = std::function<Vec3(double)>;

RegularityReport validate_regularity(const Curve& curve, const RegularityWitness& witness,
                                     int sample_count = 200);
// Variant for arbitrary parametrized curves (test inputs such as polylines).
RegularityReport validate_regularity(const CurveFunction& gamma, double length, bool closed,
                                     const RegularityWitness& witness, int sample_count = 200);

enum class FamilyKind { ParallelOffset, Recess };

// Comparison curves at distance d.  normal_sign flips the normal field
// (e.g. -1 for an outward offset of a circle whose principal normal points inward).
struct ComparisonFamily {
  FamilyKind kind = FamilyKind::ParallelOffset;
  double normal_sign = 1.0;
  double recess_width = 0.0;  // bump half-width for Recess; 0 selects min(0.5, L/8)

  double width(const Curve& curve) const;
};

// C^2 bump (1 - x^2)^3 on [-1, 1].
double recess_bump(double x);
double recess_bump_derivative(double x);

// ParallelOffset: gamma(s) + d n(s).  Recess: gamma(s) + d w((s - anchor)/rho) n(s).
Vec3 comparison_point(const ComparisonFamily& family, const Curve& curve, double s, double d,
                      double anchor = 0.0);
// |d/ds comparison_point|; identically 1 is not assumed for either family.
double comparison_jacobian(const ComparisonFamily& family, const Curve& curve, double s, double d,
                           double anchor = 0.0);

}  // namespace leakywire
