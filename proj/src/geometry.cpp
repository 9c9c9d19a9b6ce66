#include "leakywire/geometry.hpp"

#include "leakywire/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace leakywire {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFrameGrid = 8192;

double wrap(double s, double length) {
  double r = std::fmod(s, length);
  if (r < 0.0) r += length;
  return r;
}

void require_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Segment: return "segment";
    case CurveKind::CircleLoop: return "circle";
    case CurveKind::CircularArc: return "arc";
    case CurveKind::FourierLoop: return "fourier";
  }
  return "unknown";
}

Curve Curve::segment(double length, const Vec3& origin, const Vec3& direction, const Vec3& normal) {
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("segment length must be positive");
  require_finite(origin, "segment origin");
  if (!(direction.norm() > 0.0)) throw ConfigError("segment direction must be nonzero");
  Curve c;
  c.kind_ = CurveKind::Segment;
  c.length_ = length;
  c.origin_ = origin;
  c.dir_ = direction.normalized();
  Vec3 n = normal - normal.dot(c.dir_) * c.dir_;
  if (n.norm() < 1e-12) throw ConfigError("segment normal must not be parallel to its direction");
  c.nrm_ = n.normalized();
  return c;
}

Curve Curve::circle(double length, const Vec3& center, const Vec3& e1, const Vec3& e2) {
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("circle length must be positive");
  require_finite(center, "circle center");
  Curve c;
  c.kind_ = CurveKind::CircleLoop;
  c.length_ = length;
  c.radius_ = length / (2.0 * kPi);
  c.origin_ = center;
  c.e1_ = e1.normalized();
  Vec3 f2 = e2 - e2.dot(c.e1_) * c.e1_;
  if (f2.norm() < 1e-12) throw ConfigError("circle plane vectors must be independent");
  c.e2_ = f2.normalized();
  return c;
}

Curve Curve::arc(double radius, double angle, const Vec3& center, const Vec3& e1, const Vec3& e2) {
  if (!(radius > 0.0)) throw ConfigError("arc radius must be positive");
  if (!(angle > 0.0) || !(angle < 2.0 * kPi)) throw ConfigError("arc angle must lie in (0, 2 pi)");
  Curve c = circle(2.0 * kPi * radius, center, e1, e2);
  c.kind_ = CurveKind::CircularArc;
  c.length_ = radius * angle;
  c.radius_ = radius;
  return c;
}

Curve Curve::fourier(double length, FourierCoefficients coeffs, double speed_tol) {
  if (!(length > 0.0)) throw ConfigError("fourier loop length must be positive");
  std::size_t k = std::max(coeffs.cos_terms.size(), coeffs.sin_terms.size());
  if (k == 0) throw ConfigError("fourier loop needs at least one harmonic");
  coeffs.cos_terms.resize(k, Vec3::Zero());
  coeffs.sin_terms.resize(k, Vec3::Zero());
  Curve c;
  c.kind_ = CurveKind::FourierLoop;
  c.length_ = length;
  c.fourier_ = std::move(coeffs);
  double dev = c.speed_deviation();
  if (dev > speed_tol) {
    std::ostringstream os;
    os << "fourier loop is not unit speed: max | |gamma'| - 1 | = " << dev << " > " << speed_tol;
    throw ConfigError(os.str());
  }
  c.build_frame();
  return c;
}

std::string Curve::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << "(L=" << length_;
  if (kind_ == CurveKind::CircularArc) os << ", R=" << radius_;
  os << ")";
  return os.str();
}

Vec3 Curve::point(double s) const {
  if (!(s >= 0.0 && s <= length_)) throw DomainError("arc length parameter outside [0, L]");
  return eval(s);
}

double Curve::chord(double s, double t) const {
  if (!(s >= 0.0 && s <= length_ && t >= 0.0 && t <= length_))
    throw DomainError("arc length parameter outside [0, L]");
  double u = t - s;
  if (closed()) {
    if (u > 0.5 * length_) u -= length_;
    if (u < -0.5 * length_) u += length_;
  }
  return chord_offset(s, u);
}

double Curve::param_distance(double s, double t) const {
  if (!(s >= 0.0 && s <= length_ && t >= 0.0 && t <= length_))
    throw DomainError("arc length parameter outside [0, L]");
  double p = std::abs(s - t);
  return closed() ? std::min(p, length_ - p) : p;
}

Vec3 Curve::eval(double s) const {
  switch (kind_) {
    case CurveKind::Segment: return origin_ + s * dir_;
    case CurveKind::CircleLoop:
    case CurveKind::CircularArc: {
      double th = s / radius_;
      return origin_ + radius_ * (std::cos(th) * e1_ + std::sin(th) * e2_);
    }
    case CurveKind::FourierLoop: {
      Vec3 p = fourier_.mean;
      double w = 2.0 * kPi / length_;
      for (std::size_t k = 0; k < fourier_.cos_terms.size(); ++k) {
        double a = w * double(k + 1) * s;
        p += std::cos(a) * fourier_.cos_terms[k] + std::sin(a) * fourier_.sin_terms[k];
      }
      return p;
    }
  }
  return Vec3::Zero();
}

Vec3 Curve::tangent(double s) const {
  switch (kind_) {
    case CurveKind::Segment: return dir_;
    case CurveKind::CircleLoop:
    case CurveKind::CircularArc: {
      double th = s / radius_;
      return -std::sin(th) * e1_ + std::cos(th) * e2_;
    }
    case CurveKind::FourierLoop: {
      Vec3 p = Vec3::Zero();
      double w = 2.0 * kPi / length_;
      for (std::size_t k = 0; k < fourier_.cos_terms.size(); ++k) {
        double wk = w * double(k + 1);
        double a = wk * s;
        p += wk * (-std::sin(a) * fourier_.cos_terms[k] + std::cos(a) * fourier_.sin_terms[k]);
      }
      return p;
    }
  }
  return Vec3::Zero();
}

Vec3 Curve::acceleration(double s) const {
  switch (kind_) {
    case CurveKind::Segment: return Vec3::Zero();
    case CurveKind::CircleLoop:
    case CurveKind::CircularArc: {
      double th = s / radius_;
      return -(std::cos(th) * e1_ + std::sin(th) * e2_) / radius_;
    }
    case CurveKind::FourierLoop: {
      Vec3 p = Vec3::Zero();
      double w = 2.0 * kPi / length_;
      for (std::size_t k = 0; k < fourier_.cos_terms.size(); ++k) {
        double wk = w * double(k + 1);
        double a = wk * s;
        p -= wk * wk * (std::cos(a) * fourier_.cos_terms[k] + std::sin(a) * fourier_.sin_terms[k]);
      }
      return p;
    }
  }
  return Vec3::Zero();
}

Vec3 Curve::displacement(double s, double u) const {
  switch (kind_) {
    case CurveKind::Segment: return u * dir_;
    case CurveKind::CircleLoop:
    case CurveKind::CircularArc: {
      double half = 0.5 * u / radius_;
      double mid = s / radius_ + half;
      double sh = 2.0 * radius_ * std::sin(half);
      return sh * (-std::sin(mid) * e1_ + std::cos(mid) * e2_);
    }
    case CurveKind::FourierLoop: {
      Vec3 p = Vec3::Zero();
      double w = 2.0 * kPi / length_;
      for (std::size_t k = 0; k < fourier_.cos_terms.size(); ++k) {
        double wk = w * double(k + 1);
        double half = 0.5 * wk * u;
        double mid = wk * s + half;
        double sh = 2.0 * std::sin(half);
        p += sh * (-std::sin(mid) * fourier_.cos_terms[k] + std::cos(mid) * fourier_.sin_terms[k]);
      }
      return p;
    }
  }
  return Vec3::Zero();
}

void Curve::build_frame() {
  // Double reflection marching of a rotation-minimizing normal.
  frame_.resize(kFrameGrid + 1);
  double h = length_ / kFrameGrid;
  Vec3 t0 = tangent(0.0).normalized();
  Vec3 a = acceleration(0.0);
  Vec3 n0 = a - a.dot(t0) * t0;
  if (n0.norm() < 1e-8) {
    Vec3 trial = std::abs(t0.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    n0 = trial - trial.dot(t0) * t0;
  }
  frame_[0] = n0.normalized();
  Vec3 ti = t0;
  Vec3 xi = eval(0.0);
  for (int i = 0; i < kFrameGrid; ++i) {
    Vec3 xn = eval((i + 1) * h);
    Vec3 tn = tangent((i + 1) * h).normalized();
    Vec3 v1 = xn - xi;
    double c1 = v1.squaredNorm();
    Vec3 rl = frame_[i] - (2.0 / c1) * v1.dot(frame_[i]) * v1;
    Vec3 tl = ti - (2.0 / c1) * v1.dot(ti) * v1;
    Vec3 v2 = tn - tl;
    double c2 = v2.squaredNorm();
    Vec3 rn = c2 > 0.0 ? Vec3(rl - (2.0 / c2) * v2.dot(rl) * v2) : rl;
    rn -= rn.dot(tn) * tn;
    frame_[i + 1] = rn.normalized();
    xi = xn;
    ti = tn;
  }
}

Vec3 Curve::normal(double s) const {
  switch (kind_) {
    case CurveKind::Segment: return nrm_;
    case CurveKind::CircleLoop:
    case CurveKind::CircularArc: {
      double th = s / radius_;
      return -(std::cos(th) * e1_ + std::sin(th) * e2_);
    }
    case CurveKind::FourierLoop: {
      double x = wrap(s, length_) / length_ * kFrameGrid;
      int i = std::min(int(x), kFrameGrid - 1);
      double f = x - i;
      Vec3 n = (1.0 - f) * frame_[i] + f * frame_[i + 1];
      Vec3 t = tangent(s).normalized();
      n -= n.dot(t) * t;
      return n.normalized();
    }
  }
  return Vec3::Zero();
}

double Curve::speed_deviation(int samples) const {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double s = length_ * i / samples;
    worst = std::max(worst, std::abs(tangent(s).norm() - 1.0));
  }
  return worst;
}

Domain Domain::whole(const Curve& curve) {
  Domain d;
  d.curve_ = curve;
  d.components_ = {{0.0, curve.length()}};
  d.periodic_ = curve.closed();
  return d;
}

Domain Domain::intervals(const Curve& curve, std::vector<Interval> components) {
  if (components.empty()) throw ConfigError("domain needs at least one component");
  std::sort(components.begin(), components.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < components.size(); ++i) {
    const Interval& c = components[i];
    if (!(c.hi - c.lo >= 1e-12)) throw ConfigError("degenerate domain component (length < 1e-12)");
    if (i > 0 && c.lo < components[i - 1].hi) throw ConfigError("domain components overlap");
  }
  double span = components.back().hi - components.front().lo;
  if (curve.closed()) {
    if (span > curve.length() + 1e-12) throw ConfigError("domain wraps more than once around the loop");
  } else if (components.front().lo < 0.0 || components.back().hi > curve.length()) {
    throw ConfigError("domain component outside [0, L]");
  }
  Domain d;
  d.curve_ = curve;
  d.components_ = std::move(components);
  d.periodic_ = false;
  return d;
}

double Domain::measure() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.length();
  return m;
}

int Domain::component_of(double s) const {
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (s > components_[i].lo && s < components_[i].hi) return int(i);
  return -1;
}

HiatusCurve::HiatusCurve(Curve base, double s0, double epsilon)
    : base_(std::move(base)), s0_(s0), epsilon_(epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("hiatus half-width must be nonnegative");
  double length = base_.length();
  if (base_.closed()) {
    if (!(s0 >= 0.0 && s0 <= length)) throw DomainError("hiatus centre outside [0, L]");
    if (!(2.0 * epsilon < length)) throw DomainError("hiatus longer than the loop");
  } else if (!(s0 - epsilon > 0.0 && s0 + epsilon < length)) {
    throw DomainError("hiatus (s0 - eps, s0 + eps) must lie inside (0, L)");
  }
}

Domain HiatusCurve::domain() const {
  if (epsilon_ == 0.0) return Domain::whole(base_);
  double length = base_.length();
  if (base_.closed()) return Domain::intervals(base_, {{s0_ + epsilon_, s0_ + length - epsilon_}});
  return Domain::intervals(base_, {{0.0, s0_ - epsilon_}, {s0_ + epsilon_, length}});
}

RegularityReport validate_regularity(const CurveFunction& gamma, double length, bool closed,
                                     const RegularityWitness& witness, int sample_count) {
  if (sample_count < 100) throw ConfigError("validate_regularity needs at least 100 samples");
  if (!(witness.c > 0.0) || !(witness.mu > 1.0)) throw ConfigError("witness needs c > 0 and mu > 1");
  std::vector<double> grid(sample_count);
  for (int i = 0; i < sample_count; ++i)
    grid[i] = 0.5 * length * (1.0 - std::cos(kPi * (i + 0.5) / sample_count));
  std::vector<double> shifts = {0.0};
  if (closed) shifts = {0.0, 0.25 * length, 0.5 * length, 0.75 * length};

  RegularityReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * length;
  for (double shift : shifts) {
    std::vector<Vec3> pts(sample_count);
    for (int i = 0; i < sample_count; ++i) pts[i] = gamma(closed ? wrap(grid[i] + shift, length) : grid[i]);
    for (int i = 0; i < sample_count; ++i) {
      for (int j = i + 1; j < sample_count; ++j) {
        double u = std::abs(grid[i] - grid[j]);
        double cu = witness.c * std::pow(u, witness.mu);
        if (cu >= 1.0) continue;
        double margin = (pts[i] - pts[j]).norm() - u * (1.0 - cu);
        ++rep.pairs_checked;
        double si = closed ? wrap(grid[i] + shift, length) : grid[i];
        double sj = closed ? wrap(grid[j] + shift, length) : grid[j];
        if (margin < rep.worst_margin) {
          rep.worst_margin = margin;
          rep.worst_s = si;
          rep.worst_t = sj;
        }
        if (margin < -tol) rep.violations.push_back({si, sj, margin});
      }
    }
  }
  rep.passed = rep.violations.empty();
  return rep;
}

RegularityReport validate_regularity(const Curve& curve, const RegularityWitness& witness,
                                     int sample_count) {
  return validate_regularity([&curve](double s) { return curve.eval(s); }, curve.length(),
                             curve.closed(), witness, sample_count);
}

double ComparisonFamily::width(const Curve& curve) const {
  return recess_width > 0.0 ? recess_width : std::min(0.5, curve.length() / 8.0);
}

double recess_bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  double a = 1.0 - x * x;
  return a * a * a;
}

double recess_bump_derivative(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  double a = 1.0 - x * x;
  return -6.0 * x * a * a;
}

Vec3 comparison_point(const ComparisonFamily& family, const Curve& curve, double s, double d,
                      double anchor) {
  if (!(d > 0.0)) throw DomainError("comparison offset must be positive");
  double amp = d * family.normal_sign;
  if (family.kind == FamilyKind::Recess) amp *= recess_bump((s - anchor) / family.width(curve));
  return curve.eval(s) + amp * curve.normal(s);
}

double comparison_jacobian(const ComparisonFamily& family, const Curve& curve, double s, double d,
                           double anchor) {
  // The normal fields used here satisfy n' = -(gamma'' . n) gamma'.
  double kn = curve.acceleration(s).dot(curve.normal(s));
  double w = 1.0, dw = 0.0;
  if (family.kind == FamilyKind::Recess) {
    double rho = family.width(curve);
    w = recess_bump((s - anchor) / rho);
    dw = recess_bump_derivative((s - anchor) / rho) / rho;
  }
  double a = 1.0 - d * family.normal_sign * w * kn;
  double b = d * family.normal_sign * dw;
  return std::sqrt(a * a + b * b);
}

}  // namespace leakywire
