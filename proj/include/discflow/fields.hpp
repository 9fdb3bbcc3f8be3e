#pragma once

#include "discflow/mollify.hpp"
#include "discflow/piecewise.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace discflow {

/// The discontinuous part of the velocity: a piecewise-constant function with
/// a declared positive lower bound.
class VelocityFn {
public:
    VelocityFn(PiecewiseConstantFn base, double lower_bound);

    const PiecewiseConstantFn& base() const { return base_; }
    double operator()(double x) const { return base_(x); }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    static VelocityFn constant(double c) { return VelocityFn(PiecewiseConstantFn::constant(c), c); }

private:
    PiecewiseConstantFn base_;
    double lower_;
    double upper_;
};

/// A smooth (C^1) velocity bounded away from zero, produced by mollification.
/// Carries the lower/upper bounds of the base and an exact derivative.
class SmoothVelocity {
public:
    SmoothVelocity(MollifiedFn f, double lower_bound);

    double operator()(double x) const { return f_(x); }
    double derivative(double x) const { return f_.derivative(x); }
    double lower() const { return lower_; }
    double upper() const { return f_.max_value(); }
    double lipschitz() const { return f_.lipschitz_bound(); }
    const MollifiedFn& fn() const { return f_; }

private:
    MollifiedFn f_;
    double lower_;
};

SmoothVelocity mollify(const VelocityFn& v, double eps);

/// Evaluable lambda(t, x) with declared sup bound L and spatial Lipschitz
/// bound L2. Time regularity: piecewise continuous in t; the declared time
/// breakpoints act as mandatory integrator step boundaries. `time_modulus`
/// bounds |lambda(t,x)-lambda(s,x)| <= time_modulus*|t-s| between breakpoints
/// (0 for autonomous fields).
class LipschitzField {
public:
    using Eval = std::function<double(double, double)>;

    LipschitzField(Eval eval, double sup_bound, double lip_x_bound,
                   std::vector<double> time_breaks = {}, double time_modulus = 0.0,
                   Eval d_dx = nullptr);

    double operator()(double t, double x) const { return eval_(t, x); }
    double sup_bound() const { return L_; }
    double lip_x() const { return L2_; }
    double time_modulus() const { return time_mod_; }
    const std::vector<double>& time_breaks() const { return tbreaks_; }

    bool has_dx() const { return static_cast<bool>(ddx_); }
    double d_dx(double t, double x) const;

    /// Spot checks of the declared bounds on random (t, x, y) batches.
    /// Returns the worst observed violation margin (<= 0 means all good).
    double sample_check(double T, double x_lo, double x_hi, int n, unsigned seed) const;

    static LipschitzField constant(double c);
    /// lambda(t, x) = a + b*x; sup bound supplied over the region of interest.
    static LipschitzField affine_x(double a, double b, double sup_bound);
    /// lambda(t, x) = cos(omega*t).
    static LipschitzField cosine_t(double omega);

private:
    Eval eval_;
    double L_;
    double L2_;
    std::vector<double> tbreaks_;
    double time_mod_;
    Eval ddx_;
};

/// Nonlocal weight: nonnegative piecewise-constant kernel. When the traffic
/// assumptions are active its support lies in [0, support_right] and the
/// nonlocal term looks forward: w(x) = int gamma(y - x) q(y) dy.
class Kernel {
public:
    /// Degenerate (identically zero) kernel.
    Kernel() : Kernel(PiecewiseConstantFn(), 0.0, true) {}
    Kernel(PiecewiseConstantFn shape, double support_right, bool monotone_decreasing);

    const PiecewiseConstantFn& shape() const { return shape_; }
    double operator()(double s) const { return shape_(s); }
    double support_right() const { return A_; }
    double l1_norm() const { return l1_; }
    double tv_seminorm() const { return tv_; }
    double tv_positive_axis() const { return tv_pos_; }
    bool monotone_decreasing() const { return mono_dec_; }
    /// gamma(0) in the right-continuous representative.
    double value_at_zero() const { return shape_(0.0); }

    /// Exact primitive of the kernel, anchored at 0.
    double primitive(double s) const { return shape_.primitive(s); }

    /// 10 * chi_[0, 0.1): the kernel of the paper's example runs.
    static Kernel box_forward(double height, double width);

private:
    PiecewiseConstantFn shape_;
    double A_;
    double l1_;
    double tv_;
    double tv_pos_;
    bool mono_dec_;
};

} // namespace discflow
