#include "config.hpp"
#include "commands.hpp"

#include "leakywire/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace leakywire;
using namespace leakywire::cli;
using doctest::Approx;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("fnv-1a hash") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("minimal segment config") {
  RunConfig c = parse_config_text("[curve]\nkind = \"segment\"\nlength = 3.5\n");
  CHECK(c.curve.kind == "segment");
  CHECK(c.curve.length == 3.5);
  CHECK(c.alpha == 0.0);
  CHECK(c.workers == 1);
  CHECK(c.mesh.basis == "hat");
  CHECK(c.hash == fnv1a("[curve]\nkind = \"segment\"\nlength = 3.5\n"));
  CHECK_FALSE(c.defaults.empty());
  CHECK(make_curve(c.curve).length() == 3.5);
}

TEST_CASE("full config") {
  RunConfig c = parse_config_text(R"(
alpha = -0.25
workers = 3
[curve]
kind = "circle"
length = 6.0
[mesh]
basis = "trig"
harmonics = 5
panels = 40
order = 10
splitting = "interval"
[tolerances]
lambda_lo = -20.0
branch_count = 4
root_tol = 1e-11
[hiatus]
s0 = 1.5
eps = [0.1, 0.05]
states = [0, 1]
[regcheck]
lambda = -2.0
points = [1.0, 2.0]
normal_sign = -1
[eigfun]
state = 1
lo = [-1, -1, 0]
hi = [1, 1, 0]
n = [3, 3, 1]
exclude = 0.05
)");
  CHECK(c.alpha == -0.25);
  CHECK(c.workers == 3);
  CHECK(c.mesh.harmonics == 5);
  CHECK(c.mesh.mesh.panels == 40);
  CHECK(c.mesh.splitting == Splitting::Interval);
  CHECK(c.spectrum.lambda_lo.value() == -20.0);
  CHECK(c.spectrum.branch_count == 4);
  CHECK(c.hiatus.s0.value() == 1.5);
  CHECK(c.hiatus.eps.size() == 2);
  CHECK(c.hiatus.states == std::vector<int>{0, 1});
  CHECK(c.regcheck.normal_sign == -1.0);
  CHECK(c.eigfun.n[1] == 3);
  Curve curve = make_curve(c.curve);
  Basis b = make_basis(Domain::whole(curve), c.mesh);
  CHECK(b.kind() == BasisKind::Trig);
  CHECK(b.size() == 11);
  CHECK(assembly_options(c).workers == 3);
}

TEST_CASE("fourier curve config") {
  RunConfig c = parse_config_text(R"(
[curve]
kind = "fourier"
length = 12.566370614359172
cos = [[0, 1, 0], [0, 0, 0], [0, -0.3333333333333333, 0]]
sin = [[2, 0, 1], [0, 0, 0], [0, 0, -0.3333333333333333]]
)");
  Curve curve = make_curve(c.curve);
  CHECK(curve.kind() == CurveKind::FourierLoop);
  CHECK(curve.speed_deviation() < 1e-12);
}

TEST_CASE("config errors name the key") {
  CHECK(error_of("[curve]\nkind = \"segment\"\nlength = -1\n").find("curve.length: must be positive") !=
        std::string::npos);
  std::string unknown = error_of("[curve]\nkind = \"segment\"\nlength = 1\nlenght = 2\n");
  CHECK(unknown.find("curve.lenght: unknown key") != std::string::npos);
  CHECK(unknown.find("line 4") != std::string::npos);
  CHECK(error_of("[curve]\nkind = \"spiral\"\nlength = 1\n").find("curve.kind") != std::string::npos);
  CHECK(error_of("[curve\n").find("TOML syntax error") != std::string::npos);
  CHECK(error_of("alpha = 1\n").find("curve: required table missing") != std::string::npos);
  CHECK(error_of("[curve]\nkind = \"segment\"\nlength = 1\n[mesh]\npanels = 1.5\n").find("mesh.panels") !=
        std::string::npos);
  CHECK(error_of("[curve]\nkind = \"segment\"\nlength = 1\n[regcheck]\nnormal_sign = 2\n").find("normal_sign") !=
        std::string::npos);
  CHECK(error_of("[curve]\nkind = \"segment\"\nlength = 1\n[mesh]\nbasis = \"trig\"\n").empty());
  RunConfig c = parse_config_text("[curve]\nkind = \"segment\"\nlength = 1\n[mesh]\nbasis = \"trig\"\n");
  CHECK_THROWS_AS(make_basis(Domain::whole(make_curve(c.curve)), c.mesh), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(std::stod(format_double(std::numbers::pi)) == std::numbers::pi);
}
