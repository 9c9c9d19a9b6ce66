#pragma once

#include "leakywire/bs_operator.hpp"
#include "leakywire/geometry.hpp"
#include "leakywire/hiatus.hpp"
#include "leakywire/spectral.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace leakywire::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct CurveConfig {
  std::string kind = "segment";  // segment | circle | arc | fourier
  double length = 0.0;
  double radius = 0.0;
  double angle = 0.0;
  FourierCoefficients fourier;
};

struct MeshConfig {
  std::string basis = "hat";  // hat | trig
  int harmonics = 16;
  MeshOptions mesh;
  Splitting splitting = Splitting::Periodic;
};

struct HiatusConfig {
  std::optional<double> s0;
  std::vector<double> eps;  // empty: default grid
  int eps_count = 8;
  std::vector<int> states = {0};
  double overlap_threshold = 0.5;
};

struct RegcheckConfig {
  double lambda = -1.0;
  std::vector<double> points;  // empty: 0.2 L, 0.35 L, 0.5 L, 0.65 L, 0.8 L
  std::vector<double> d;       // empty: default grid
  double normal_sign = 1.0;
};

struct EigfunConfig {
  int state = 0;
  int member = 0;
  std::vector<Vec3> points;                 // explicit points, or
  std::array<double, 3> lo{}, hi{};         // a box grid
  std::array<int, 3> n{0, 0, 0};
  double exclude = 0.0;  // skip points closer than this to the curve
};

struct RunConfig {
  std::string source;  // path the config was read from
  std::uint64_t hash = 0;
  double alpha = 0.0;
  int workers = 1;
  CurveConfig curve;
  MeshConfig mesh;
  SpectrumOptions spectrum;
  HiatusConfig hiatus;
  RegcheckConfig regcheck;
  EigfunConfig eigfun;
  std::vector<std::string> defaults;  // keys that were filled with defaults
};

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Throws ConfigError naming the offending key (and the source position for syntax errors).
RunConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

Curve make_curve(const CurveConfig& c);
Basis make_basis(const Domain& domain, const MeshConfig& m);
AssemblyOptions assembly_options(const RunConfig& cfg);

}  // namespace leakywire::cli
