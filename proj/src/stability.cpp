#include "discflow/stability.hpp"

#include <algorithm>
#include <cmath>

namespace discflow::ode {

namespace {

struct Pieces {
    double vup, vtup, vlo;
    double L, L2;
    double y_lo, y_hi;
    double lam_int;  // int_0^t lam_diff_sup
    double prefactor, x0_term;
};

Pieces common_pieces(double vup, double vtup, double vlo_1, double vlo_2,
                     const LipschitzField& lam, const LipschitzField& lam_tilde, double x0,
                     double x0_tilde, double t, double T,
                     const std::function<double(double)>& lam_diff_sup) {
    Pieces p;
    p.vup = vup;
    p.vtup = vtup;
    p.vlo = std::min(vlo_1, vlo_2);
    p.L = std::max(lam.sup_bound(), lam_tilde.sup_bound());
    p.L2 = std::max(lam.lip_x(), lam_tilde.lip_x());
    p.y_lo = std::min(x0 - T * vup * p.L, x0_tilde);
    p.y_hi = std::max(x0 + T * vup * p.L, x0_tilde);
    // Composite Simpson over [0, t]; the catalogue suprema are smooth in s.
    const int n = 64;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double a = t * k / n, b = t * (k + 1) / n;
        acc += (b - a) / 6.0 *
               (lam_diff_sup(a) + 4.0 * lam_diff_sup(0.5 * (a + b)) + lam_diff_sup(b));
    }
    p.lam_int = acc;
    const double egrow = p.vup * std::exp(t * p.vup * p.L2);
    p.prefactor = egrow;
    p.x0_term = (egrow * t * p.L2 + 1.0) * (p.vtup / p.vlo);
    return p;
}

StabilityBounds assemble(const Pieces& p, double x0_diff, double l1, double prim_osc) {
    StabilityBounds b;
    b.lambda_term = p.prefactor * p.lam_int;
    b.l1_term = l1;
    b.primitive_term = prim_osc;
    b.strong = b.lambda_term + p.x0_term * (x0_diff + l1 / p.vlo);
    // The weak variant controls the surrogate-transform distance by the
    // oscillation of the primitive difference y -> int_0^y (v - v~) over the
    // reachable window (the primitive-gap form; a plain integral over the
    // whole window would vanish for any mass-preserving perturbation).
    b.weak = b.lambda_term + p.x0_term * x0_diff + p.x0_term * prim_osc / p.vlo;
    return b;
}

}  // namespace

StabilityBounds stability_bound(const VelocityFn& v, const VelocityFn& v_tilde,
                                const LipschitzField& lam, const LipschitzField& lam_tilde,
                                double x0, double x0_tilde, double t, double T,
                                const std::function<double(double)>& lam_diff_sup) {
    const Pieces p = common_pieces(v.upper(), v_tilde.upper(), v.lower(), v_tilde.lower(), lam,
                                   lam_tilde, x0, x0_tilde, t, T, lam_diff_sup);
    const double l1 = v.base().l1_distance(v_tilde.base(), p.y_lo, p.y_hi);
    // both primitives are piecewise linear: extrema at the breakpoint grid
    const auto grid =
        refine_breakpoints(v.base().breakpoints(), v_tilde.base().breakpoints(), p.y_lo, p.y_hi);
    double dmin = 1e300, dmax = -1e300;
    for (double y : grid) {
        const double d = v.base().primitive(y) - v_tilde.base().primitive(y);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    return assemble(p, std::abs(x0 - x0_tilde), l1, dmax - dmin);
}

StabilityBounds stability_bound(const VelocityFn& v, const SmoothVelocity& v_eps,
                                const LipschitzField& lam, const LipschitzField& lam_tilde,
                                double x0, double x0_tilde, double t, double T,
                                const std::function<double(double)>& lam_diff_sup) {
    const Pieces p = common_pieces(v.upper(), v_eps.upper(), v.lower(), v_eps.lower(), lam,
                                   lam_tilde, x0, x0_tilde, t, T, lam_diff_sup);
    std::vector<double> extra;
    for (double b : v_eps.fn().base().breakpoints()) {
        extra.push_back(b - v_eps.fn().eps());
        extra.push_back(b);
        extra.push_back(b + v_eps.fn().eps());
    }
    std::sort(extra.begin(), extra.end());
    const auto grid = refine_breakpoints(v.base().breakpoints(), extra, p.y_lo, p.y_hi);
    // L1 distance |v - v_eps| by adaptive quadrature per refined cell (the
    // integrand is piecewise smooth between the grid points).
    double l1 = 0.0;
    double dmin = 1e300, dmax = -1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i + 1 < grid.size()) {
            auto g = [&](double x) { return std::abs(v(x) - v_eps(x)); };
            l1 += adaptive_simpson(g, grid[i], grid[i + 1], 1e-13);
        }
        // primitive difference extrema: sample inside cells as well
        const double a = grid[i];
        const double b = (i + 1 < grid.size()) ? grid[i + 1] : grid[i];
        for (int k = 0; k <= 4; ++k) {
            const double y = a + (b - a) * k / 4.0;
            const double d = v.base().primitive(y) - v_eps.fn().primitive(y);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
            if (a == b) break;
        }
    }
    return assemble(p, std::abs(x0 - x0_tilde), l1, dmax - dmin);
}

} // namespace discflow::ode
