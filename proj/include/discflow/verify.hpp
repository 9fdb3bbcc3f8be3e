#pragma once

#include "discflow/nonlocal.hpp"
#include "discflow/ode.hpp"
#include "discflow/stability.hpp"

#include <vector>

namespace discflow::verify {

/// Errors along a decreasing parameter ladder, plus the fitted decay rate
/// (log-log slope). Rates are reported, never asserted beyond monotone
/// decrease.
struct ConvergenceStudy {
    std::vector<double> params;
    std::vector<double> errors;
    double fitted_rate = 0.0;
    bool monotone_decreasing(double slack = 0.0) const;
    void fit_rate();
};

/// Ground-truth trajectory at desk scale: fixed-step RK4 on the transformed
/// c-equation (whose right-hand side is globally Lipschitz), Richardson
/// extrapolated between n and 2n steps, sampled on a uniform output grid.
struct BruteForceTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    double value_at(double t) const;  // linear interpolation between samples
};

BruteForceTrajectory brute_force_trajectory(const VelocityFn& v, const LipschitzField& lam,
                                            double x0, double T, int n_steps, int n_out = 256);

/// ODE-level mollified chain: solves X[v_eps, lam] for each eps, reports
/// sup-norm distance to the discontinuous solve over (0,T) x [x_lo, x_hi]
/// and checks each rung against the weak stability bound.
struct MollifiedOdeChain {
    ConvergenceStudy study;
    std::vector<double> weak_bounds;    // evaluated weak bound per rung
    std::vector<double> strong_bounds;  // evaluated L1-form bound per rung
    bool weak_ok = false;    // every (x0, rung) error under its weak bound
    bool strong_ok = false;  // every (x0, rung) error under its strong bound
};

MollifiedOdeChain mollified_ode_chain(const VelocityFn& v, const LipschitzField& lam,
                                      std::span<const double> eps_ladder, double T, double x_lo,
                                      double x_hi, int n_x0 = 21, int n_t = 33,
                                      double tol = 1e-10);

/// PDE-level mollified chain: runs the nonlocal solver with (v_eps, V, q0_eps)
/// and reports weak errors against the discontinuous run for each test
/// function (max over the functions).
ConvergenceStudy mollified_pde_chain(const nonlocal::Scenario& base,
                                     std::span<const double> eps_ladder,
                                     const std::vector<PiecewiseLinear>& test_functions,
                                     double tol = 1e-8);

/// ||f o g_eps - f o g||_{L1(window)} for piecewise-constant f and monotone
/// piecewise-linear maps, exact, against the TV * ||g_eps^{-1} - g^{-1}||_inf
/// bound.
struct CompositionReport {
    double observed_l1;
    double bound;
};

CompositionReport composition_l1_check(const PiecewiseConstantFn& f, const PiecewiseLinear& g,
                                       const PiecewiseLinear& g_eps, double a, double b);

} // namespace discflow::verify
