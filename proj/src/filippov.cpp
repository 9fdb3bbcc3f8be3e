#include "discflow/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace discflow::ode {

FilippovEnclosure filippov_enclosure(const VelocityFn& v, const LipschitzField& lam, double t,
                                     double x, double delta, int ladder_rungs) {
    if (!(delta > 0.0)) throw InvalidParameter("filippov_enclosure: delta must be positive");
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double d = delta;
    const auto& bp = v.base().breakpoints();
    const auto& vals = v.base().values();
    for (int r = 0; r < ladder_rungs; ++r, d *= 0.5) {
        const double a = x - d, b = x + d;
        // v-values attained on a set of positive measure inside (a, b)
        const std::size_t ia = v.base().interval_index(a);
        const std::size_t ib = v.base().interval_index(b);
        double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
        for (std::size_t i = ia; i <= ib; ++i) {
            // skip degenerate intersections (zero length)
            const double left = (i == 0) ? a : std::max(a, bp[i - 1]);
            const double right = (i == bp.size()) ? b : std::min(b, bp[i]);
            if (right <= left) continue;
            vmin = std::min(vmin, vals[i]);
            vmax = std::max(vmax, vals[i]);
        }
        const double lam_c = lam(t, x);
        const double lam_lo = lam_c - lam.lip_x() * d, lam_hi = lam_c + lam.lip_x() * d;
        double flo = std::numeric_limits<double>::infinity(), fhi = -flo;
        for (double vv : {vmin, vmax})
            for (double ll : {lam_lo, lam_hi}) {
                flo = std::min(flo, vv * ll);
                fhi = std::max(fhi, vv * ll);
            }
        lo = std::max(lo, flo);  // intersection over the ladder
        hi = std::min(hi, fhi);
        if (lo > hi) {  // numeric fringe; fall back to the smallest rung
            lo = flo;
            hi = fhi;
        }
    }
    return {lo, hi, d * 2.0};
}

OsgoodCertificate osgood_certificate(const VelocityFn& v, const LipschitzField& lam_autonomous) {
    if (!lam_autonomous.time_breaks().empty() || lam_autonomous.time_modulus() != 0.0)
        throw PreconditionViolation("osgood_certificate: field must be autonomous");
    // A piecewise-constant v is discontinuous on a finite set, which is
    // Lebesgue-null regardless of lambda's zero set.
    OsgoodCertificate c;
    c.bad_set_measure = 0.0;
    c.osgood_slope = v.upper() * lam_autonomous.lip_x();
    c.unique = (c.bad_set_measure == 0.0);
    return c;
}

double filippov_containment(const Trajectory& X, const VelocityFn& v, const LipschitzField& lam,
                            int n_samples, double dt) {
    const double T = X.T();
    int inside = 0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = (T - dt) * i / (n_samples - 1);
        const double xt = X(t);
        const double quot = (X(t + dt) - xt) / dt;
        // Ball radius covering everything the state visits during [t, t+dt];
        // a single rung so the ball is not shrunk below the visited segment.
        const double reach = 2.0 * v.upper() * lam.sup_bound() * dt;
        const auto enc = filippov_enclosure(v, lam, t, xt, std::max(reach, 1e-9), 1);
        const double margin = v.upper() * lam.time_modulus() * dt + 1e-7;
        if (enc.contains(quot, margin)) ++inside;
    }
    return static_cast<double>(inside) / n_samples;
}

} // namespace discflow::ode
