#pragma once

#include "discflow/fields.hpp"
#include "discflow/nonlocal.hpp"
#include "discflow/piecewise.hpp"

#include <string>
#include <vector>

namespace discflow {

/// JSON schemas:
///   piecewise-constant: {"breakpoints":[...],"values":[...]}
///   kernel:             + {"support_right":A,"monotone_decreasing":bool}
///   velocity:           + {"lower_bound":v}
///   scenario: {"q0":PCF,"gamma":Kernel,
///              "V":{"kind":"affine","a":1,"b":-1}|{"kind":"constant","c":1},
///              "v":Velocity,"T":real,"window":[x_min,x_max],
///              "grid":{"ny":int,"nt":int}}

std::string to_json(const PiecewiseConstantFn& f);
PiecewiseConstantFn pcf_from_json(const std::string& text);

std::string to_json(const Kernel& k);
Kernel kernel_from_json(const std::string& text);

std::string to_json(const nonlocal::Scenario& s);
nonlocal::Scenario scenario_from_json(const std::string& text);
nonlocal::Scenario scenario_from_file(const std::string& path);

/// ODE scenario for the CLI: velocity, a catalogue field, initial points.
struct OdeScenario {
    VelocityFn v = VelocityFn::constant(1.0);
    LipschitzField lambda = LipschitzField::constant(1.0);
    std::string lambda_kind;  // "constant" | "affine" | "cosine"
    std::vector<double> x0;
    double T = 1.0;
    double tol = 1e-9;
};

OdeScenario ode_scenario_from_json(const std::string& text);
OdeScenario ode_scenario_from_file(const std::string& path);

} // namespace discflow
