#pragma once

#include "discflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace discflow {

/// Dense-output coefficients of one accepted Dormand-Prince step over
/// [t, t + h] (h signed). Evaluate with `dense_eval`.
struct Dopri5Step {
    double t, h;
    double y, ydiff, bspl, r4, r5;
};

inline double dense_eval(const Dopri5Step& s, double t) {
    const double th = (t - s.t) / s.h;
    const double th1 = 1.0 - th;
    return s.y + th * (s.ydiff + th1 * (s.bspl + th * (s.r4 + th1 * s.r5)));
}

/// Scalar embedded Dormand-Prince 5(4) integrator with the classic quartic
/// continuous extension. Supports forward and backward integration;
/// `query_times` must be sorted in the direction of integration and lie in
/// [t0, t1]; dense values are written to `query_out`. `on_step` is invoked
/// once per accepted step. Returns y(t1).
///
/// Local error is controlled against atol = rtol = tol. Throws
/// IntegrationFailure on step-size underflow.
template <class F, class StepObserver>
double dopri5_integrate(F&& f, double t0, double y0, double t1, double tol,
                        std::span<const double> query_times, std::span<double> query_out,
                        StepObserver&& on_step,
                        double h_max = std::numeric_limits<double>::infinity(),
                        double h_init = 0.0) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // e = b5 - b4: the embedded error estimator weights.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;

    if (t1 == t0) {
        for (std::size_t i = 0; i < query_times.size(); ++i) query_out[i] = y0;
        return y0;
    }
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double atol = tol, rtol = tol;

    double t = t0, y = y0;
    double k1 = f(t, y);

    // Initial step size: caller hint, else Hairer's hinit (scalar form).
    double h;
    if (h_init > 0.0) {
        h = std::min({h_init, span, h_max});
    } else {
        const double sk = atol + rtol * std::abs(y);
        const double d0 = std::abs(y) / sk, dd1 = std::abs(k1) / sk;
        double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * (d0 / dd1);
        h0 = std::min(h0, span);
        const double y_pr = y + dir * h0 * k1;
        const double f_pr = f(t + dir * h0, y_pr);
        const double d2 = std::abs(f_pr - k1) / sk / h0;
        double h1;
        if (std::max(dd1, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(dd1, d2), 0.2);
        h = std::min({100.0 * h0, h1, span, h_max});
    }

    std::size_t qi = 0;
    bool last = false;
    int rejected_in_row = 0;

    while (true) {
        const double remaining = std::abs(t1 - t);
        // a roundoff-sized remainder counts as arrival
        if (remaining <=
            4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(t), std::abs(t1)}))
            break;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        if (!(h > 0.0) ||
            h < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw IntegrationFailure("dopri5: step size underflow", t, h);
        const double hs = dir * h;

        const double k2 = f(t + c2 * hs, y + hs * (a21 * k1));
        const double k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const double k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 =
            f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double k7 = f(t + hs, y1);

        const double err_raw = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double sk = atol + rtol * std::max(std::abs(y), std::abs(y1));
        const double err = std::abs(err_raw) / sk;

        if (err <= 1.0) {
            const double ydiff = y1 - y;
            const double bspl = hs * k1 - ydiff;
            const double r4 = ydiff - hs * k7 - bspl;
            const double r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            const Dopri5Step step{t, hs, y, ydiff, bspl, r4, r5};
            while (qi < query_times.size() && dir * (query_times[qi] - (t + hs)) <= 0.0) {
                query_out[qi] = dense_eval(step, query_times[qi]);
                ++qi;
            }
            on_step(step);
            t += hs;
            y = y1;
            k1 = k7;  // FSAL
            if (last) break;
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = (rejected_in_row > 0) ? h * std::min(fac, 1.0) : h * fac;
            h = std::min(h, h_max);
            rejected_in_row = 0;
        } else {
            last = false;
            ++rejected_in_row;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
    while (qi < query_times.size()) query_out[qi++] = y;
    return y;
}

struct NoStepObserver {
    void operator()(const Dopri5Step&) const {}
};

template <class F>
double dopri5_integrate(F&& f, double t0, double y0, double t1, double tol,
                        std::span<const double> query_times = {},
                        std::span<double> query_out = {},
                        double h_max = std::numeric_limits<double>::infinity()) {
    return dopri5_integrate(std::forward<F>(f), t0, y0, t1, tol, query_times, query_out,
                            NoStepObserver{}, h_max);
}

/// Recursive adaptive Simpson quadrature; used by a-posteriori residual
/// certificates, independent of the time stepper.
template <class G>
double adaptive_simpson(G&& g, double a, double b, double tol, int depth = 30) {
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    struct Rec {
        G& g;
        double operator()(double a, double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = g(lm), frm = g(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return (*this)(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   (*this)(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } rec{g};
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec(a, b, fa, fm, fb, whole, tol, depth);
}

} // namespace discflow
