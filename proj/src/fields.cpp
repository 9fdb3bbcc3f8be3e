#include "discflow/fields.hpp"

#include "discflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace discflow {

VelocityFn::VelocityFn(PiecewiseConstantFn base, double lower_bound)
    : base_(std::move(base)), lower_(lower_bound), upper_(base_.max_value()) {
    if (!(lower_ > 0.0)) throw InvalidParameter("velocity: lower bound must be positive");
    if (base_.min_value() < lower_)
        throw InvalidParameter("velocity: a value lies below the declared lower bound");
}

SmoothVelocity::SmoothVelocity(MollifiedFn f, double lower_bound)
    : f_(std::move(f)), lower_(lower_bound) {
    if (!(lower_ > 0.0)) throw InvalidParameter("smooth velocity: lower bound must be positive");
}

SmoothVelocity mollify(const VelocityFn& v, double eps) {
    return SmoothVelocity(mollify(v.base(), eps), v.lower());
}

LipschitzField::LipschitzField(Eval eval, double sup_bound, double lip_x_bound,
                               std::vector<double> time_breaks, double time_modulus, Eval d_dx)
    : eval_(std::move(eval)), L_(sup_bound), L2_(lip_x_bound),
      tbreaks_(std::move(time_breaks)), time_mod_(time_modulus), ddx_(std::move(d_dx)) {
    if (!eval_) throw InvalidParameter("lipschitz field: missing evaluator");
    if (L_ < 0.0 || L2_ < 0.0) throw InvalidParameter("lipschitz field: negative bound");
    std::sort(tbreaks_.begin(), tbreaks_.end());
}

double LipschitzField::d_dx(double t, double x) const {
    if (!ddx_) throw InvalidParameter("lipschitz field: no spatial derivative available");
    return ddx_(t, x);
}

double LipschitzField::sample_check(double T, double x_lo, double x_hi, int n,
                                    unsigned seed) const {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, T), ux(x_lo, x_hi);
    double worst = -1e300;
    for (int i = 0; i < n; ++i) {
        const double t = ut(rng), x = ux(rng), y = ux(rng);
        worst = std::max(worst, std::abs(eval_(t, x)) - L_);
        const double dx = std::abs(x - y);
        if (dx > 1e-12)
            worst = std::max(worst, std::abs(eval_(t, x) - eval_(t, y)) - L2_ * dx);
    }
    return worst;
}

LipschitzField LipschitzField::constant(double c) {
    return LipschitzField([c](double, double) { return c; }, std::abs(c), 0.0, {}, 0.0,
                          [](double, double) { return 0.0; });
}

LipschitzField LipschitzField::affine_x(double a, double b, double sup_bound) {
    return LipschitzField([a, b](double, double x) { return a + b * x; }, sup_bound,
                          std::abs(b), {}, 0.0, [b](double, double) { return b; });
}

LipschitzField LipschitzField::cosine_t(double omega) {
    return LipschitzField([omega](double t, double) { return std::cos(omega * t); }, 1.0, 0.0,
                          {}, std::abs(omega), [](double, double) { return 0.0; });
}

Kernel::Kernel(PiecewiseConstantFn shape, double support_right, bool monotone_decreasing)
    : shape_(std::move(shape)), A_(support_right), mono_dec_(monotone_decreasing) {
    if (shape_.min_value() < 0.0) throw InvalidParameter("kernel: must be nonnegative");
    if (A_ < 0.0) throw InvalidParameter("kernel: support_right must be >= 0");
    if (!shape_.breakpoints().empty()) {
        if (shape_.values().front() != 0.0 || shape_.values().back() != 0.0)
            throw InvalidParameter("kernel: must vanish on both tails");
        l1_ = shape_.integrate(shape_.breakpoints().front(), shape_.breakpoints().back());
        tv_ = shape_.total_variation(shape_.breakpoints().front() - 1.0,
                                     shape_.breakpoints().back() + 1.0);
        const double right_end = shape_.breakpoints().back() + 1.0;
        tv_pos_ = shape_.total_variation(0.0, right_end);
    } else {
        if (shape_.values()[0] != 0.0)
            throw InvalidParameter("kernel: a nonzero constant kernel is not integrable");
        l1_ = tv_ = tv_pos_ = 0.0;
    }
    if (mono_dec_) {
        // Monotone decreasing on the positive axis implies |gamma|_TV(R>0) = gamma(0).
        if (std::abs(tv_pos_ - value_at_zero()) > 1e-12 * std::max(1.0, value_at_zero()))
            throw InvalidParameter("kernel: monotone_decreasing flag inconsistent with shape");
    }
}

Kernel Kernel::box_forward(double height, double width) {
    if (!(height >= 0.0) || !(width > 0.0)) throw InvalidParameter("kernel: bad box parameters");
    return Kernel(PiecewiseConstantFn::indicator(0.0, width, height), width, true);
}

} // namespace discflow
