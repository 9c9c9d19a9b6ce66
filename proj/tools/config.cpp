#include "config.hpp"

#include "leakywire/errors.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace leakywire::cli {

namespace {

std::string where(const toml::node& n) {
  const auto& src = n.source();
  if (!src.begin) return "";
  return " (line " + std::to_string(src.begin.line) + ", column " + std::to_string(src.begin.column) + ")";
}

class Section {
 public:
  Section(const toml::table* table, std::string path, const std::string& source, std::vector<std::string>& defaults)
      : table_(table), path_(std::move(path)), source_(source), defaults_(defaults) {}

  bool present() const { return table_ != nullptr; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg, const toml::node* n = nullptr) const {
    throw ConfigError(source_ + ": " + qualified(key) + ": " + msg + (n ? where(*n) : ""));
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const toml::node* node(const std::string& key) {
    allowed_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  double number(const std::string& key, std::optional<double> def) {
    const toml::node* n = node(key);
    if (!n) {
      if (!def) fail(key, "required key missing");
      defaults_.push_back(qualified(key));
      return *def;
    }
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
      if (!std::isfinite(*v)) fail(key, "must be finite", n);
      return *v;
    }
    fail(key, "expected a number", n);
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!node(key)) return std::nullopt;
    return number(key, std::nullopt);
  }

  int integer(const std::string& key, int def) {
    const toml::node* n = node(key);
    if (!n) {
      defaults_.push_back(qualified(key));
      return def;
    }
    if (!n->is_integer()) fail(key, "expected an integer", n);
    int64_t v = *n->value<int64_t>();
    if (v < -1000000000 || v > 1000000000) fail(key, "integer out of range", n);
    return int(v);
  }

  std::string string(const std::string& key, const std::string& def, std::initializer_list<const char*> choices) {
    const toml::node* n = node(key);
    if (!n) {
      defaults_.push_back(qualified(key));
      return def;
    }
    if (!n->is_string()) fail(key, "expected a string", n);
    std::string v = *n->value<std::string>();
    std::string list;
    for (const char* c : choices) {
      if (v == c) return v;
      list += std::string(list.empty() ? "" : ", ") + c;
    }
    fail(key, "'" + v + "' is not one of " + list, n);
  }

  std::vector<double> numbers(const std::string& key) {
    const toml::node* n = node(key);
    std::vector<double> out;
    if (!n) return out;
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of numbers", n);
    for (const auto& e : *a) {
      auto v = e.value<double>();
      if (!v || !(e.is_floating_point() || e.is_integer()) || !std::isfinite(*v))
        fail(key, "expected an array of finite numbers", &e);
      out.push_back(*v);
    }
    return out;
  }

  std::vector<Vec3> vectors(const std::string& key) {
    const toml::node* n = node(key);
    std::vector<Vec3> out;
    if (!n) return out;
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of 3-vectors", n);
    for (const auto& e : *a) out.push_back(vec3(key, e));
    return out;
  }

  Vec3 vector(const std::string& key, const Vec3& def) {
    const toml::node* n = node(key);
    if (!n) {
      defaults_.push_back(qualified(key));
      return def;
    }
    return vec3(key, *n);
  }

  void reject_unknown() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_)
      if (!allowed_.count(std::string(k.str()))) fail(std::string(k.str()), "unknown key", &v);
  }

 private:
  Vec3 vec3(const std::string& key, const toml::node& n) const {
    const toml::array* a = n.as_array();
    if (!a || a->size() != 3) fail(key, "expected a 3-vector [x, y, z]", &n);
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      auto x = (*a)[i].value<double>();
      if (!x || !std::isfinite(*x)) fail(key, "vector components must be finite numbers", &n);
      v[i] = *x;
    }
    return v;
  }

  const toml::table* table_;
  std::string path_;
  const std::string& source_;
  std::vector<std::string>& defaults_;
  std::set<std::string> allowed_;
};

const toml::table* subtable(const toml::table& root, const std::string& key, const std::string& source) {
  const toml::node* n = root.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(source + ": " + key + ": expected a table" + where(*n));
  return n->as_table();
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw ConfigError(source + ": TOML syntax error: " + std::string(e.description()) + " (line " +
                      std::to_string(b.line) + ", column " + std::to_string(b.column) + ")");
  }
  RunConfig cfg;
  cfg.source = source;
  cfg.hash = fnv1a(text);

  Section top(&root, "", source, cfg.defaults);
  cfg.alpha = top.number("alpha", 0.0);
  cfg.workers = top.integer("workers", 1);
  if (cfg.workers < 1) top.fail("workers", "must be at least 1");
  for (const char* t : {"curve", "mesh", "tolerances", "hiatus", "regcheck", "eigfun"}) top.node(t);
  top.reject_unknown();

  const toml::table* ct = subtable(root, "curve", source);
  if (!ct) throw ConfigError(source + ": curve: required table missing");
  Section curve(ct, "curve", source, cfg.defaults);
  cfg.curve.kind = curve.string("kind", "segment", {"segment", "circle", "arc", "fourier"});
  if (cfg.curve.kind == "arc") {
    cfg.curve.radius = curve.number("radius", std::nullopt);
    cfg.curve.angle = curve.number("angle", std::nullopt);
    if (!(cfg.curve.radius > 0.0)) curve.fail("radius", "must be positive");
    if (!(cfg.curve.angle > 0.0 && cfg.curve.angle < 2.0 * std::numbers::pi)) curve.fail("angle", "must lie in (0, 2 pi)");
    cfg.curve.length = cfg.curve.radius * cfg.curve.angle;
  } else {
    cfg.curve.length = curve.number("length", std::nullopt);
    if (!(cfg.curve.length > 0.0)) curve.fail("length", "must be positive");
  }
  if (cfg.curve.kind == "fourier") {
    cfg.curve.fourier.mean = curve.vector("mean", Vec3::Zero());
    cfg.curve.fourier.cos_terms = curve.vectors("cos");
    cfg.curve.fourier.sin_terms = curve.vectors("sin");
    if (cfg.curve.fourier.cos_terms.empty() && cfg.curve.fourier.sin_terms.empty())
      curve.fail("cos", "a Fourier loop needs at least one harmonic");
  }
  curve.reject_unknown();

  Section mesh(subtable(root, "mesh", source), "mesh", source, cfg.defaults);
  cfg.mesh.basis = mesh.string("basis", "hat", {"hat", "trig"});
  cfg.mesh.harmonics = mesh.integer("harmonics", 16);
  cfg.mesh.mesh.panels = mesh.integer("panels", 64);
  cfg.mesh.mesh.order = mesh.integer("order", 8);
  cfg.mesh.mesh.grading_ratio = mesh.number("grading_ratio", 0.15);
  cfg.mesh.mesh.grading_levels = mesh.integer("grading_levels", 10);
  cfg.mesh.splitting = mesh.string("splitting", "periodic", {"periodic", "interval"}) == "interval"
                           ? Splitting::Interval
                           : Splitting::Periodic;
  if (cfg.mesh.mesh.panels < 2) mesh.fail("panels", "must be at least 2");
  if (cfg.mesh.mesh.order < 1 || cfg.mesh.mesh.order > 64) mesh.fail("order", "must lie in [1, 64]");
  if (!(cfg.mesh.mesh.grading_ratio > 0.0 && cfg.mesh.mesh.grading_ratio < 1.0))
    mesh.fail("grading_ratio", "must lie in (0, 1)");
  if (cfg.mesh.mesh.grading_levels < 0) mesh.fail("grading_levels", "must be nonnegative");
  if (cfg.mesh.harmonics < 0) mesh.fail("harmonics", "must be nonnegative");
  mesh.reject_unknown();

  Section tol(subtable(root, "tolerances", source), "tolerances", source, cfg.defaults);
  cfg.spectrum.lambda_lo = tol.optional_number("lambda_lo");
  cfg.spectrum.lambda_hi = tol.number("lambda_hi", -1e-8);
  cfg.spectrum.branch_count = tol.integer("branch_count", 8);
  cfg.spectrum.root_tol = tol.number("root_tol", 1e-10);
  cfg.spectrum.cluster_tol = tol.number("cluster_tol", 1e-6);
  cfg.spectrum.max_iterations = tol.integer("max_iterations", 100);
  if (!(cfg.spectrum.lambda_hi < 0.0)) tol.fail("lambda_hi", "must be negative");
  if (cfg.spectrum.lambda_lo && !(*cfg.spectrum.lambda_lo < cfg.spectrum.lambda_hi))
    tol.fail("lambda_lo", "must be below lambda_hi");
  if (cfg.spectrum.branch_count < 1) tol.fail("branch_count", "must be at least 1");
  if (!(cfg.spectrum.root_tol > 0.0)) tol.fail("root_tol", "must be positive");
  if (!(cfg.spectrum.cluster_tol > 0.0)) tol.fail("cluster_tol", "must be positive");
  if (cfg.spectrum.max_iterations < 1) tol.fail("max_iterations", "must be at least 1");
  tol.reject_unknown();

  Section hi(subtable(root, "hiatus", source), "hiatus", source, cfg.defaults);
  cfg.hiatus.s0 = hi.optional_number("s0");
  cfg.hiatus.eps = hi.numbers("eps");
  cfg.hiatus.eps_count = hi.integer("eps_count", 8);
  cfg.hiatus.overlap_threshold = hi.number("overlap_threshold", 0.5);
  if (hi.node("states")) {
    cfg.hiatus.states.clear();
    for (double v : hi.numbers("states")) {
      if (v < 0 || v != std::floor(v)) hi.fail("states", "expected nonnegative integers");
      cfg.hiatus.states.push_back(int(v));
    }
    if (cfg.hiatus.states.empty()) hi.fail("states", "must not be empty");
  }
  for (double e : cfg.hiatus.eps)
    if (!(e >= 0.0)) hi.fail("eps", "values must be nonnegative");
  if (cfg.hiatus.eps_count < 2) hi.fail("eps_count", "must be at least 2");
  if (!(cfg.hiatus.overlap_threshold > 0.0 && cfg.hiatus.overlap_threshold < 1.0))
    hi.fail("overlap_threshold", "must lie in (0, 1)");
  hi.reject_unknown();

  Section rc(subtable(root, "regcheck", source), "regcheck", source, cfg.defaults);
  cfg.regcheck.lambda = rc.number("lambda", -1.0);
  cfg.regcheck.points = rc.numbers("points");
  cfg.regcheck.d = rc.numbers("d");
  cfg.regcheck.normal_sign = rc.number("normal_sign", 1.0);
  if (!(cfg.regcheck.lambda < 0.0)) rc.fail("lambda", "must be negative");
  if (cfg.regcheck.normal_sign != 1.0 && cfg.regcheck.normal_sign != -1.0) rc.fail("normal_sign", "must be 1 or -1");
  rc.reject_unknown();

  Section ef(subtable(root, "eigfun", source), "eigfun", source, cfg.defaults);
  cfg.eigfun.state = ef.integer("state", 0);
  cfg.eigfun.member = ef.integer("member", 0);
  cfg.eigfun.exclude = ef.number("exclude", 0.0);
  cfg.eigfun.points = ef.vectors("points");
  if (ef.node("lo") || ef.node("hi") || ef.node("n")) {
    Vec3 lo = ef.vector("lo", Vec3::Zero()), hiv = ef.vector("hi", Vec3::Zero());
    std::vector<double> n = ef.numbers("n");
    if (n.size() != 3) ef.fail("n", "expected three grid counts");
    for (int i = 0; i < 3; ++i) {
      if (n[i] < 1 || n[i] != std::floor(n[i])) ef.fail("n", "grid counts must be positive integers");
      if (n[i] > 1 && !(hiv[i] > lo[i])) ef.fail("hi", "must exceed lo along every gridded axis");
      cfg.eigfun.lo[i] = lo[i];
      cfg.eigfun.hi[i] = hiv[i];
      cfg.eigfun.n[i] = int(n[i]);
    }
  }
  if (cfg.eigfun.state < 0) ef.fail("state", "must be nonnegative");
  if (cfg.eigfun.member < 0) ef.fail("member", "must be nonnegative");
  if (!(cfg.eigfun.exclude >= 0.0)) ef.fail("exclude", "must be nonnegative");
  ef.reject_unknown();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

Curve make_curve(const CurveConfig& c) {
  if (c.kind == "segment") return Curve::segment(c.length);
  if (c.kind == "circle") return Curve::circle(c.length);
  if (c.kind == "arc") return Curve::arc(c.radius, c.angle);
  return Curve::fourier(c.length, c.fourier);
}

Basis make_basis(const Domain& domain, const MeshConfig& m) {
  PanelMesh mesh = build_mesh(domain, m.mesh);
  if (m.basis == "trig") return Basis::trig(std::move(mesh), m.harmonics);
  return Basis::hat(std::move(mesh));
}

AssemblyOptions assembly_options(const RunConfig& cfg) {
  AssemblyOptions o;
  o.splitting = cfg.mesh.splitting;
  o.workers = cfg.workers;
  return o;
}

}  // namespace leakywire::cli
