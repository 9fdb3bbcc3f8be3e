#include "discflow/derivatives.hpp"
#include "discflow/filippov.hpp"
#include "discflow/json_io.hpp"
#include "discflow/nonlocal.hpp"
#include "discflow/stability.hpp"
#include "discflow/verify.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace discflow;

namespace {

std::vector<double> trajectory_samples(const ode::Trajectory& X, int n) {
    std::vector<double> out(n + 1);
    for (int k = 0; k <= n; ++k) out[k] = X(X.T() * k / n);
    return out;
}

}  // namespace

PYBIND11_MODULE(discflow, m) {
    m.doc() = "characteristics-based solvers for nonlocal conservation laws with a "
              "discontinuous velocity";

    py::class_<PiecewiseConstantFn>(m, "PiecewiseConstantFn")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"),
             py::arg("values"))
        .def_static("constant", &PiecewiseConstantFn::constant)
        .def_static("indicator", &PiecewiseConstantFn::indicator)
        .def("__call__", &PiecewiseConstantFn::operator())
        .def("integrate", &PiecewiseConstantFn::integrate)
        .def("total_variation", &PiecewiseConstantFn::total_variation)
        .def_property_readonly("breakpoints", &PiecewiseConstantFn::breakpoints)
        .def_property_readonly("values", &PiecewiseConstantFn::values);

    m.def("oscillating_sign_velocity", &oscillating_sign_velocity, py::arg("cutoff") = 1e-3);

    py::class_<MollifiedFn>(m, "MollifiedFn")
        .def("__call__", &MollifiedFn::operator())
        .def("derivative", &MollifiedFn::derivative)
        .def("primitive", &MollifiedFn::primitive)
        .def_property_readonly("eps", &MollifiedFn::eps)
        .def_property_readonly("lipschitz_bound", &MollifiedFn::lipschitz_bound);
    m.def("mollify", py::overload_cast<const PiecewiseConstantFn&, double>(&mollify));
    m.def("primitive_gap",
          py::overload_cast<const PiecewiseConstantFn&, const MollifiedFn&, double>(
              &primitive_gap));

    py::class_<VelocityFn>(m, "VelocityFn")
        .def(py::init<PiecewiseConstantFn, double>(), py::arg("base"), py::arg("lower_bound"))
        .def_static("constant", &VelocityFn::constant)
        .def("__call__", &VelocityFn::operator())
        .def_property_readonly("lower", &VelocityFn::lower)
        .def_property_readonly("upper", &VelocityFn::upper);

    py::class_<LipschitzField>(m, "LipschitzField")
        .def_static("constant", &LipschitzField::constant)
        .def_static("affine_x", &LipschitzField::affine_x, py::arg("a"), py::arg("b"),
                    py::arg("sup_bound"))
        .def_static("cosine_t", &LipschitzField::cosine_t)
        .def("__call__", &LipschitzField::operator());

    m.def("z_eval", &z_eval, py::arg("v"), py::arg("x0"), py::arg("x"));
    m.def("z_invert", &z_invert, py::arg("v"), py::arg("x0"), py::arg("u"));

    py::class_<ode::Trajectory>(m, "Trajectory")
        .def("__call__", &ode::Trajectory::operator())
        .def("samples", &trajectory_samples, py::arg("n") = 256)
        .def_property_readonly("x0", &ode::Trajectory::x0)
        .def_property_readonly("T", &ode::Trajectory::T)
        .def_property_readonly("residual", &ode::Trajectory::residual);

    m.def(
        "solve_trajectory",
        [](const VelocityFn& v, const LipschitzField& lam, double x0, double T, double tol) {
            ode::SolveOptions opt;
            opt.tol = tol;
            return ode::solve_trajectory(v, lam, x0, T, opt);
        },
        py::arg("v"), py::arg("lam"), py::arg("x0"), py::arg("T"), py::arg("tol") = 1e-9);
    m.def("fd_derivative_x0", &ode::fd_derivative_x0, py::arg("v"), py::arg("lam"),
          py::arg("x0"), py::arg("t"), py::arg("h"), py::arg("tol") = 1e-9);

    py::class_<Kernel>(m, "Kernel")
        .def(py::init<PiecewiseConstantFn, double, bool>(), py::arg("shape"),
             py::arg("support_right"), py::arg("monotone_decreasing"))
        .def_static("box_forward", &Kernel::box_forward, py::arg("height"), py::arg("width"))
        .def_property_readonly("l1_norm", &Kernel::l1_norm)
        .def_property_readonly("tv_seminorm", &Kernel::tv_seminorm);

    py::class_<nonlocal::VelocityLaw>(m, "VelocityLaw")
        .def_static("constant", &nonlocal::VelocityLaw::constant)
        .def_static("affine", &nonlocal::VelocityLaw::affine)
        .def("__call__", &nonlocal::VelocityLaw::operator());

    py::class_<nonlocal::Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("q0", &nonlocal::Scenario::q0)
        .def_readwrite("gamma", &nonlocal::Scenario::gamma)
        .def_readwrite("V", &nonlocal::Scenario::V)
        .def_readwrite("v", &nonlocal::Scenario::v)
        .def_readwrite("T", &nonlocal::Scenario::T)
        .def_readwrite("x_min", &nonlocal::Scenario::x_min)
        .def_readwrite("x_max", &nonlocal::Scenario::x_max)
        .def_property(
            "grid",
            [](const nonlocal::Scenario& s) { return std::pair{s.grid.ny, s.grid.nt}; },
            [](nonlocal::Scenario& s, std::pair<int, int> g) {
                s.grid.ny = g.first;
                s.grid.nt = g.second;
            })
        .def("validate", &nonlocal::Scenario::validate);
    m.def("scenario_from_json", &scenario_from_json);
    m.def("scenario_to_json", py::overload_cast<const nonlocal::Scenario&>(&to_json));

    py::class_<nonlocal::AuditRow>(m, "AuditRow")
        .def_readonly("t", &nonlocal::AuditRow::t)
        .def_readonly("mass_lagrangian", &nonlocal::AuditRow::mass_lagrangian)
        .def_readonly("mass_eulerian", &nonlocal::AuditRow::mass_eulerian)
        .def_readonly("sup", &nonlocal::AuditRow::sup)
        .def_readonly("tv", &nonlocal::AuditRow::tv);

    py::class_<nonlocal::WindowReport>(m, "WindowReport")
        .def_readonly("t0", &nonlocal::WindowReport::t0)
        .def_readonly("t1", &nonlocal::WindowReport::t1)
        .def_readonly("diffs", &nonlocal::WindowReport::diffs);

    py::class_<nonlocal::NonlocalSolution>(m, "NonlocalSolution")
        .def_readonly("audit", &nonlocal::NonlocalSolution::audit)
        .def_readonly("windows", &nonlocal::NonlocalSolution::windows)
        .def_property_readonly(
            "times", [](const nonlocal::NonlocalSolution& s) { return s.chars.times; })
        .def("time_index", &nonlocal::NonlocalSolution::time_index)
        .def("mass_lagrangian", &nonlocal::NonlocalSolution::mass_lagrangian)
        .def("mass_eulerian", &nonlocal::NonlocalSolution::mass_eulerian)
        .def("one_sided_density", &nonlocal::NonlocalSolution::one_sided_density)
        .def("eulerian_samples", &nonlocal::NonlocalSolution::eulerian_samples,
             py::arg("k"), py::arg("n") = 400);

    m.def("horizon_estimate", &nonlocal::horizon_estimate);
    m.def("fixed_point_solve", &nonlocal::fixed_point_solve, py::arg("scenario"),
          py::arg("tol") = 1e-8, py::arg("max_iter") = 50,
          py::call_guard<py::gil_scoped_release>());

    py::register_exception<InvalidParameter>(m, "InvalidParameterError");
    py::register_exception<IntegrationFailure>(m, "IntegrationFailureError");
    py::register_exception<GridTooCoarse>(m, "GridTooCoarseError");
    py::register_exception<PreconditionViolation>(m, "PreconditionViolationError");
}
