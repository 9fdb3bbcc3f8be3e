#pragma once

#include "discflow/piecewise.hpp"

#include <functional>

namespace discflow {

/// Convolution of a piecewise-constant function with the symmetric triangular
/// (hat) kernel of support [-eps, eps] and unit mass. Evaluation, derivative
/// and primitive are closed-form (second differences of the base function's
/// polynomial antiderivatives), so no sampling error enters anywhere.
///
/// Guarantees inherited from the kernel (nonnegative, unit mass, compact
/// support): range stays within [min f, max f], Lipschitz constant at most
/// (max f - min f)/eps, and sup_y |int_0^y (f_eps - f)| <= 2 eps sup|f|.
class MollifiedFn {
public:
    MollifiedFn(PiecewiseConstantFn base, double eps);

    double operator()(double x) const;
    double derivative(double x) const;
    /// Exact primitive anchored at 0.
    double primitive(double x) const;

    double eps() const { return eps_; }
    const PiecewiseConstantFn& base() const { return base_; }

    double min_value() const { return base_.min_value(); }
    double max_value() const { return base_.max_value(); }
    /// Lipschitz bound (max f - min f)/eps.
    double lipschitz_bound() const;

private:
    PiecewiseConstantFn base_;
    double eps_;
    double prim_anchor_;
};

MollifiedFn mollify(const PiecewiseConstantFn& f, double eps);

/// sup_{y in [-R, R]} |int_0^y (f - g)|, with the sup taken over a refinement
/// of both functions' breakpoint sets plus interior samples per cell.
double primitive_gap(const PiecewiseConstantFn& f, const MollifiedFn& g, double R);
double primitive_gap(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, double R);
/// Generic version: g integrable, supplied with its primitive anchored at 0.
double primitive_gap(const PiecewiseConstantFn& f,
                     const std::function<double(double)>& g_primitive, double R,
                     std::span<const double> g_breakpoints);

} // namespace discflow
