#pragma once

#include "discflow/ode.hpp"

#include <vector>

namespace discflow::ode {

/// Two-sided a-priori bounds on difference quotients
/// |X(x0;t)-X(x~0;t)| / |x0-x~0|:
///   (v_lo/v_up) e^{-t L2 v_up}  <=  quotient  <=  (v_up/v_lo) e^{t L2 v_up}.
struct DerivBounds {
    double lower, upper;
};

DerivBounds deriv_quotient_bounds(double v_lower, double v_upper, double lip_x, double t);

struct DerivBoundsRow {
    double t, lower, upper, observed;
};

/// Report of finite-difference quotients against the two-sided bounds along a
/// time grid; `h` is the x0 increment of the forward quotient.
struct DerivBoundsReport {
    std::vector<DerivBoundsRow> rows;
    bool all_within(double slack) const;
};

/// Forward difference quotient (X(x0+h;t) - X(x0;t)) / h.
double fd_derivative_x0(const VelocityFn& v, const LipschitzField& lam, double x0, double t,
                        double h, double tol = 1e-9);

DerivBoundsReport fd_derivative_report(const VelocityFn& v, const LipschitzField& lam, double x0,
                                       double h, std::span<const double> times,
                                       double tol = 1e-9);

/// Closed-form derivative of the flow with respect to the initial point, valid
/// for smooth data:
///   d3 X = v(X(t))/v(x0) * exp(int_0^t d2 lambda(s, X(s)) v(X(s)) ds).
/// Requires a spatial-derivative evaluator on the field.
double explicit_deriv_smooth(const SmoothVelocity& v, const LipschitzField& lam, double x0,
                             double t, double tol = 1e-9);

struct TimeContinuityReport {
    double t, t_tilde;
    double observed_l1;
    double bound;
};

/// ||d3 X(.;t) - d3 X(.;t~)||_{L1((a,b))} by central differences on an
/// n_grid-point x0 grid, against the TV-based Lipschitz-in-time bound.
TimeContinuityReport deriv_time_continuity(const VelocityFn& v, const LipschitzField& lam,
                                           double a, double b, double t, double t_tilde,
                                           int n_grid = 800, double h = 1e-6,
                                           double tol = 1e-9);

} // namespace discflow::ode
