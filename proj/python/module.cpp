#include "leakywire/errors.hpp"
#include "leakywire/hiatus.hpp"
#include "leakywire/regcheck.hpp"
#include "leakywire/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace leakywire;

namespace {

QOperator make_operator(const Curve& curve, const std::string& basis, int panels, int order, int harmonics,
                        int workers) {
  MeshOptions mo;
  mo.panels = panels;
  mo.order = order;
  AssemblyOptions ao;
  ao.workers = workers;
  PanelMesh mesh = build_mesh(Domain::whole(curve), mo);
  if (basis == "hat") return QOperator(Basis::hat(std::move(mesh)), ao);
  if (basis == "trig") return QOperator(Basis::trig(std::move(mesh), harmonics), ao);
  throw ConfigError("basis must be 'hat' or 'trig'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bound states of 3D Schroedinger operators with a delta interaction on a finite curve";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  auto solver = py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<FitError>(m, "FitError", solver.ptr());

  py::enum_<CurveKind>(m, "CurveKind")
      .value("Segment", CurveKind::Segment)
      .value("CircleLoop", CurveKind::CircleLoop)
      .value("CircularArc", CurveKind::CircularArc)
      .value("FourierLoop", CurveKind::FourierLoop);

  py::class_<Curve>(m, "Curve")
      .def_static("segment", [](double L) { return Curve::segment(L); }, py::arg("length"))
      .def_static("circle", [](double L) { return Curve::circle(L); }, py::arg("length"))
      .def_static("arc", [](double r, double a) { return Curve::arc(r, a); }, py::arg("radius"), py::arg("angle"))
      .def_static(
          "fourier",
          [](double L, const Vec3& mean, const std::vector<Vec3>& cos_terms, const std::vector<Vec3>& sin_terms) {
            FourierCoefficients f;
            f.mean = mean;
            f.cos_terms = cos_terms;
            f.sin_terms = sin_terms;
            return Curve::fourier(L, std::move(f));
          },
          py::arg("length"), py::arg("mean"), py::arg("cos_terms"), py::arg("sin_terms"))
      .def_property_readonly("kind", &Curve::kind)
      .def_property_readonly("length", &Curve::length)
      .def_property_readonly("closed", &Curve::closed)
      .def("point", &Curve::point)
      .def("tangent", &Curve::tangent)
      .def("normal", &Curve::normal)
      .def("curvature", &Curve::curvature)
      .def("chord", &Curve::chord)
      .def("__repr__", &Curve::describe);

  m.def("green", &green, py::arg("kappa"), py::arg("rho"));
  m.def("green_smooth", &green_smooth, py::arg("kappa"), py::arg("rho"));
  m.def("green_dlambda", &green_dlambda, py::arg("kappa"), py::arg("rho"));

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("alpha", &Thresholds::alpha)
      .def_readonly("L_no_bind", &Thresholds::L_no_bind)
      .def_readonly("L_no_bind_sharp", &Thresholds::L_no_bind_sharp)
      .def_readonly("L_exists", &Thresholds::L_exists)
      .def_readonly("xi0", &Thresholds::xi0)
      .def_property_readonly("ratio", &Thresholds::ratio);
  m.def("thresholds", &thresholds, py::arg("alpha"));

  py::class_<QMatrix>(m, "QMatrix")
      .def_readonly("kappa", &QMatrix::kappa)
      .def_readonly("lambda_", &QMatrix::lambda)
      .def_readonly("M", &QMatrix::M)
      .def_readonly("B", &QMatrix::B);

  py::class_<QOperator, std::shared_ptr<QOperator>>(m, "QOperator")
      .def(py::init(&make_operator), py::arg("curve"), py::arg("basis") = "hat", py::arg("panels") = 64,
           py::arg("order") = 8, py::arg("harmonics") = 16, py::arg("workers") = 1)
      .def_property_readonly("size", &QOperator::size)
      .def("assemble", [](const QOperator& op, double lambda) { return op.assemble(SpectralParameter::from_lambda(lambda)); },
           py::arg("lambda_"))
      .def("eta", [](const QOperator& op, double lambda) {
        return eta_branches(op.assemble(SpectralParameter::from_lambda(lambda))).values;
      }, py::arg("lambda_"));

  m.def("circle_symbol", [](const Curve& c, double lambda, int k) {
    return circle_symbol(c, SpectralParameter::from_lambda(lambda), k);
  }, py::arg("circle"), py::arg("lambda_"), py::arg("k"));

  py::class_<BoundState>(m, "BoundState")
      .def_readonly("lambda_", &BoundState::lambda)
      .def_readonly("multiplicity", &BoundState::multiplicity)
      .def_readonly("residuals", &BoundState::residuals)
      .def_property_readonly("kappa", &BoundState::kappa)
      .def("trace", &BoundState::trace, py::arg("s"), py::arg("member") = 0)
      .def("psi", [](const BoundState& b, const Vec3& x, int member) { return psi_eval(b, x, member); },
           py::arg("x"), py::arg("member") = 0);

  m.def(
      "bound_states",
      [](const QOperator& op, double alpha, int branch_count) {
        SpectrumOptions so;
        so.branch_count = branch_count;
        return find_bound_states(op, alpha, so).states;
      },
      py::arg("op"), py::arg("alpha") = 0.0, py::arg("branch_count") = 8);

  py::class_<BranchTrack>(m, "BranchTrack")
      .def_readonly("member", &BranchTrack::member)
      .def_readonly("lambda_L", &BranchTrack::lambda_L)
      .def_readonly("lambdas", &BranchTrack::lambda)
      .def_readonly("predicted_slope", &BranchTrack::predicted_slope)
      .def_readonly("compression_slope", &BranchTrack::compression_slope)
      .def_readonly("fitted_slope", &BranchTrack::fitted_slope)
      .def_readonly("sign_ok", &BranchTrack::sign_ok)
      .def_readonly("fitted", &BranchTrack::fitted);

  m.def(
      "hiatus_sweep",
      [](const Curve& c, double alpha, double s0, const std::vector<double>& eps, int panels, int workers) {
        SweepOptions o;
        o.eps = eps;
        o.mesh.panels = panels;
        o.assembly.workers = workers;
        SweepResult r = sweep(c, alpha, s0, o);
        return py::make_tuple(r.eps, r.branches);
      },
      py::arg("curve"), py::arg("alpha"), py::arg("s0"), py::arg("eps") = std::vector<double>{},
      py::arg("panels") = 64, py::arg("workers") = 1);

  m.def("q_apply_direct", [](const Curve& c, double lambda, const std::string& f, double s) {
    return q_apply_direct(c, lambda, test_function(f, c.length()), s);
  }, py::arg("curve"), py::arg("lambda_"), py::arg("function"), py::arg("s"));

  m.def(
      "q_apply_via_family",
      [](const Curve& c, double lambda, const std::string& family, const std::string& f, double s) {
        ComparisonFamily fam;
        if (family == "recess")
          fam.kind = FamilyKind::Recess;
        else if (family != "parallel_offset")
          throw ConfigError("family must be 'parallel_offset' or 'recess'");
        Extrapolation e = q_apply_via_family(c, lambda, fam, test_function(f, c.length()), s, default_d_grid(c)).limit;
        return py::make_tuple(e.value, e.error);
      },
      py::arg("curve"), py::arg("lambda_"), py::arg("family"), py::arg("function"), py::arg("s"));
}
