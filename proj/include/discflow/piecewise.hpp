#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace discflow {

/// Right-continuous piecewise-constant function on the real line with
/// finitely many jumps. `values` has one entry per interval, including the
/// two unbounded tails, so `values.size() == breakpoints.size() + 1`.
///
/// The representation is exact: integrals, total variation and polynomial
/// antiderivatives are computed in closed form.
class PiecewiseConstantFn {
public:
    PiecewiseConstantFn();  // identically zero
    PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<double> values);

    static PiecewiseConstantFn constant(double c);
    /// c on [a,b), 0 elsewhere.
    static PiecewiseConstantFn indicator(double a, double b, double c);

    double operator()(double x) const;

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& values() const { return values_; }

    double min_value() const;
    double max_value() const;
    double sup_abs() const;

    /// Exact signed integral over [a,b]; antisymmetric in (a,b).
    double integrate(double a, double b) const;

    /// Exact primitive F(x) = ∫_0^x f, a monotone piecewise-linear function
    /// when f > 0. F(0) = 0.
    double primitive(double x) const;
    /// Second antiderivative G(x) = ∫_0^x F, G(0) = 0.
    double primitive2(double x) const;
    /// Third antiderivative ∫_0^x G.
    double primitive3(double x) const;

    /// Sum of |value jump| over breakpoints strictly inside (a,b).
    double total_variation(double a, double b) const;

    /// True if all interval values are (weakly) monotone nondecreasing
    /// left-to-right.
    bool is_nondecreasing() const;

    /// f + g, breakpoint union (exact).
    PiecewiseConstantFn operator+(const PiecewiseConstantFn& g) const;
    PiecewiseConstantFn operator-(const PiecewiseConstantFn& g) const;
    PiecewiseConstantFn scaled(double s) const;

    /// ∫ |f - g| over [a,b], exact.
    double l1_distance(const PiecewiseConstantFn& g, double a, double b) const;

    /// Index of the interval containing x (right-continuous convention).
    std::size_t interval_index(double x) const;

private:
    void build_cumulative();

    std::vector<double> breaks_;
    std::vector<double> values_;
    // Cumulative antiderivative values at the breakpoints: cum1_[i] = F(b_i),
    // cum2_[i] = G(b_i), cum3_[i] = ∫_0^{b_i} G, all anchored at 0.
    std::vector<double> cum1_, cum2_, cum3_;
};

/// Continuous piecewise-linear function given by nodes (x_i, y_i); constant
/// extension outside [x_front, x_back]. Used for exact primitives of
/// piecewise-constant functions, pushforward mass primitives and test
/// functions.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;

    /// Inverse evaluation for strictly increasing node values. Outside the
    /// node range the linear piece of the nearest segment is extended.
    double inverse(double y) const;

    /// Exact ∫_0^x of the PL function (piecewise quadratic).
    double primitive(double x) const;

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

    bool strictly_increasing() const;

private:
    std::vector<double> xs_, ys_;
    std::vector<double> prim_;  // primitive at nodes, anchored so that primitive(0)=0
    double prim_anchor_ = 0.0;
    void build_primitive();
};

/// Sorted union of two breakpoint sets clipped to [a,b], with a and b included.
std::vector<double> refine_breakpoints(std::span<const double> s1, std::span<const double> s2,
                                       double a, double b);

/// The Fig-1 style velocity sgn(sin(pi/x)) + 2 truncated to jumps with
/// |location| >= cutoff; the middle piece across 0 takes the neutral value 2.
PiecewiseConstantFn oscillating_sign_velocity(double cutoff = 1e-3);

} // namespace discflow
