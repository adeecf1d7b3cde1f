#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kerrpol/geodesic.hpp"
#include "kerrpol/geometry.hpp"
#include "kerrpol/polarization.hpp"
#include "kerrpol/pp_frame.hpp"
#include "kerrpol/scenario.hpp"
#include "kerrpol/transport_oracle.hpp"

namespace py = pybind11;
using namespace kerrpol;

namespace {

std::array<double, 4> frame_to_array(const FrameVector& v) { return v.c; }
std::array<double, 4> coord_to_array(const CoordVector& v) { return v.c; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Null geodesics, parallel-propagated frames, and gravitational "
            "Faraday rotation in the Kerr exterior";

  py::register_exception<precondition_error>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<stalled_orbit_error>(m, "StalledOrbitError", PyExc_RuntimeError);

  py::class_<KerrParams>(m, "KerrParams")
      .def(py::init<double, double>(), py::arg("M"), py::arg("a"))
      .def_readonly("M", &KerrParams::mass)
      .def_readonly("a", &KerrParams::spin)
      .def("horizon_outer", &KerrParams::horizon_outer)
      .def("horizon_inner", &KerrParams::horizon_inner)
      .def("ergosphere_radius", &KerrParams::ergosphere_radius, py::arg("theta"));

  py::class_<SpacetimePoint>(m, "SpacetimePoint")
      .def(py::init<const KerrParams&, double, double, double, double>(), py::arg("params"),
           py::arg("t"), py::arg("r"), py::arg("theta"), py::arg("phi"))
      .def_readonly("t", &SpacetimePoint::t)
      .def_readonly("r", &SpacetimePoint::r)
      .def_readonly("theta", &SpacetimePoint::theta)
      .def_readonly("phi", &SpacetimePoint::phi);

  py::class_<ConservedSet>(m, "ConservedSet")
      .def(py::init([](double E, double Phi, double kappa) {
             return ConservedSet{E, Phi, kappa};
           }),
           py::arg("E"), py::arg("Phi"), py::arg("kappa"))
      .def_readwrite("E", &ConservedSet::energy)
      .def_readwrite("Phi", &ConservedSet::angular_momentum)
      .def_readwrite("kappa", &ConservedSet::carter);

  py::class_<GeodesicState>(m, "GeodesicState")
      .def(py::init([](const SpacetimePoint& p, int sr, int sth, double s) {
             return GeodesicState{p, sr, sth, s};
           }),
           py::arg("point"), py::arg("sign_r"), py::arg("sign_theta"), py::arg("s") = 0.0)
      .def_readonly("point", &GeodesicState::point)
      .def_readonly("sign_r", &GeodesicState::sign_r)
      .def_readonly("sign_theta", &GeodesicState::sign_theta)
      .def_readonly("s", &GeodesicState::s);

  m.def("horizon_radii", &horizon_radii, py::arg("params"));
  m.def("scalars", &scalars, py::arg("params"), py::arg("point"));
  m.def("metric_components", &metric_components, py::arg("params"), py::arg("point"));
  m.def("coframe", &coframe, py::arg("params"), py::arg("point"));
  m.def("frame", &frame, py::arg("params"), py::arg("point"));
  m.def(
      "principal_null_directions",
      [](const KerrParams& p, const SpacetimePoint& x) {
        const auto [l, n] = principal_null_directions(p, x);
        return std::make_pair(coord_to_array(l), coord_to_array(n));
      },
      py::arg("params"), py::arg("point"));
  m.def(
      "killing_yano", [](const KerrParams& p, const SpacetimePoint& x) { return killing_yano(p, x); },
      py::arg("params"), py::arg("point"));
  m.def(
      "hodge_dual", [](const KerrParams& p, const SpacetimePoint& x) { return hodge_dual(p, x); },
      py::arg("params"), py::arg("point"));
  m.def(
      "killing_tensor",
      [](const KerrParams& p, const SpacetimePoint& x) { return killing_tensor(p, x); },
      py::arg("params"), py::arg("point"));

  m.def(
      "potentials",
      [](const ConservedSet& c, const KerrParams& p, double r, double theta) {
        const Potentials v = potentials(c, p, r, theta);
        return py::make_tuple(v.radial, v.polar, v.radial_momentum, v.polar_momentum);
      },
      py::arg("conserved"), py::arg("params"), py::arg("r"), py::arg("theta"),
      "Returns (R, Theta, P, D)");
  m.def(
      "rhs",
      [](const GeodesicState& st, const ConservedSet& c, const KerrParams& p) {
        return coord_to_array(rhs(st, c, p));
      },
      py::arg("state"), py::arg("conserved"), py::arg("params"));
  m.def(
      "tangent_frame_components",
      [](const GeodesicState& st, const ConservedSet& c, const KerrParams& p) {
        return frame_to_array(tangent_frame_components(st, c, p));
      },
      py::arg("state"), py::arg("conserved"), py::arg("params"));

  py::class_<IntegrationControl>(m, "IntegrationControl")
      .def(py::init<>())
      .def_readwrite("s_max", &IntegrationControl::s_max)
      .def_readwrite("tol", &IntegrationControl::tol)
      .def_readwrite("horizon_margin", &IntegrationControl::horizon_margin)
      .def_readwrite("escape_radius", &IntegrationControl::escape_radius);

  py::enum_<StopReason>(m, "StopReason")
      .value("ReachedSMax", StopReason::ReachedSMax)
      .value("ReachedHorizon", StopReason::ReachedHorizon)
      .value("Escaped", StopReason::Escaped);

  py::class_<Trajectory>(m, "Trajectory")
      .def("s_begin", &Trajectory::s_begin)
      .def("s_end", &Trajectory::s_end)
      .def("state", &Trajectory::state, py::arg("s"))
      .def("stop_reason", &Trajectory::stop_reason)
      .def("accepted_states", &Trajectory::accepted_states)
      .def("events",
           [](const Trajectory& t) {
             std::vector<std::pair<double, std::string>> out;
             for (const TurningEvent& e : t.events())
               out.emplace_back(e.s, e.kind == TurningKind::Radial ? "radial" : "polar");
             return out;
           });

  m.def("integrate", &integrate, py::arg("initial"), py::arg("conserved"), py::arg("params"),
        py::arg("control"));

  m.def(
      "parallel_frame",
      [](const GeodesicState& st, const ConservedSet& c, const KerrParams& p) {
        const ParallelFrame L = parallel_frame(st, c, p);
        return py::make_tuple(frame_to_array(L.L0), frame_to_array(L.L1), frame_to_array(L.L2),
                              frame_to_array(L.L3));
      },
      py::arg("state"), py::arg("conserved"), py::arg("params"));
  m.def("product_matrix", &product_matrix, py::arg("state"), py::arg("conserved"),
        py::arg("params"));

  m.def(
      "carter_observer",
      [](const KerrParams& p, const SpacetimePoint& x) {
        return coord_to_array(carter_observer(p, x));
      },
      py::arg("params"), py::arg("point"));
  m.def(
      "measurement_basis",
      [](const GeodesicState& st, const ConservedSet& c, const KerrParams& p) {
        const MeasurementBasis b = measurement_basis(st, c, p);
        return py::make_tuple(b.b1, b.b2);
      },
      py::arg("state"), py::arg("conserved"), py::arg("params"));
  m.def("faraday_angle", &faraday_angle, py::arg("from_point"), py::arg("to_point"),
        py::arg("params"));
  m.def("rotation_matrix", &rotation_matrix, py::arg("from_point"), py::arg("to_point"),
        py::arg("params"));
  m.def("critical_point_residual", &critical_point_residual, py::arg("state"),
        py::arg("conserved"), py::arg("params"));
  m.def(
      "faraday_curve",
      [](const Trajectory& t, std::size_t n) {
        std::vector<py::dict> out;
        for (const RotationSample& smp : faraday_curve(t, n)) {
          py::dict d;
          d["s"] = smp.s;
          d["r"] = smp.r;
          d["theta"] = smp.theta;
          d["phi"] = smp.phi;
          d["chi"] = smp.chi;
          d["critical_residual"] = smp.critical_residual;
          out.push_back(d);
        }
        return out;
      },
      py::arg("trajectory"), py::arg("sample_count") = 2000);
  m.def("locate_critical_points", &locate_critical_points, py::arg("trajectory"),
        py::arg("sample_count") = 2000);
  m.def("check_zero_rotation_axis", &check_zero_rotation_axis, py::arg("trajectory"),
        py::arg("tol") = 1e-10);

  m.def(
      "faraday_numeric",
      [](double c1, double c2, const Trajectory& t, double tol, std::size_t n) {
        return faraday_numeric(c1, c2, t, tol, uniform_samples(t, n));
      },
      py::arg("c1"), py::arg("c2"), py::arg("trajectory"), py::arg("tol") = 1e-10,
      py::arg("sample_count") = 512);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("note", &Scenario::note)
      .def_readwrite("M", &Scenario::mass)
      .def_readwrite("a", &Scenario::spin)
      .def_readwrite("E", &Scenario::energy)
      .def_readwrite("Phi", &Scenario::angular_momentum)
      .def_readwrite("kappa", &Scenario::carter)
      .def_readwrite("r0", &Scenario::r0)
      .def_readwrite("theta0", &Scenario::theta0)
      .def_readwrite("phi0", &Scenario::phi0)
      .def_readwrite("s_max", &Scenario::s_max)
      .def_readwrite("tol", &Scenario::tol)
      .def_readwrite("sample_count", &Scenario::sample_count);

  m.def("load_scenario", py::overload_cast<const std::string&>(&load_scenario), py::arg("path"));
  m.def("dump_scenario", &dump_scenario, py::arg("scenario"));
  m.def(
      "run_scenario",
      [](const Scenario& s, const std::string& out_dir, bool verify, bool plots,
         const std::string& format) {
        RunOptions opt;
        opt.out_dir = out_dir;
        opt.verify = verify;
        opt.write_plots = plots;
        opt.format = format;
        const RunResult r = run_scenario(s, opt);
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["artifacts"] = r.artifacts;
        d["max_chi_diff"] = r.verification.max_chi_diff;
        d["max_frame_residual"] = r.verification.max_frame_residual;
        d["max_null_residual"] = r.verification.max_null_residual;
        d["max_conserved_drift"] = r.verification.max_conserved_drift;
        d["passed"] = r.verification.passed;
        return d;
      },
      py::arg("scenario"), py::arg("out_dir"), py::arg("verify") = false,
      py::arg("plots") = false, py::arg("format") = "csv");
}
