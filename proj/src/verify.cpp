#include "discflow/verify.hpp"

#include <algorithm>
#include <cmath>

namespace discflow::verify {

bool ConvergenceStudy::monotone_decreasing(double slack) const {
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > errors[i - 1] + slack) return false;
    return true;
}

void ConvergenceStudy::fit_rate() {
    // least-squares slope of log(error) vs log(param)
    std::size_t n = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!(errors[i] > 0.0)) continue;
        const double x = std::log(params[i]), y = std::log(errors[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    fitted_rate = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
}

double BruteForceTrajectory::value_at(double t) const {
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double th = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return values[i - 1] + th * (values[i] - values[i - 1]);
}

namespace {

// classic RK4 over one output interval with m substeps
template <class F>
double rk4_span(F&& f, double t0, double y0, double t1, int m) {
    double t = t0, y = y0;
    const double h = (t1 - t0) / m;
    for (int i = 0; i < m; ++i) {
        const double k1 = f(t, y);
        const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return y;
}

}  // namespace

BruteForceTrajectory brute_force_trajectory(const VelocityFn& v, const LipschitzField& lam,
                                            double x0, double T, int n_steps, int n_out) {
    if (n_steps < 100000)
        throw InvalidParameter("brute_force_trajectory: need n_steps >= 1e5");
    SurrogateZ z(v);
    const double u0 = z.prim(x0);
    auto rhs = [&](double t, double c) { return lam(t, z.prim_inverse(c + u0)); };

    const int m = std::max(1, (n_steps + n_out - 1) / n_out);
    BruteForceTrajectory out;
    out.times.resize(n_out + 1);
    out.values.resize(n_out + 1);
    out.times[0] = 0.0;
    out.values[0] = x0;
    // Richardson between m and 2m substeps per interval (order-4 base method).
    double rc = 0.0, rf = 0.0;
    for (int k = 1; k <= n_out; ++k) {
        const double a = T * (k - 1) / n_out, b = T * k / n_out;
        rc = rk4_span(rhs, a, rc, b, m);
        rf = rk4_span(rhs, a, rf, b, 2 * m);
        const double c_extrap = (16.0 * rf - rc) / 15.0;
        out.times[k] = b;
        out.values[k] = z.prim_inverse(c_extrap + u0);
    }
    return out;
}

MollifiedOdeChain mollified_ode_chain(const VelocityFn& v, const LipschitzField& lam,
                                      std::span<const double> eps_ladder, double T, double x_lo,
                                      double x_hi, int n_x0, int n_t, double tol) {
    MollifiedOdeChain chain;
    auto z = std::make_shared<SurrogateZ>(v);
    ode::SolveOptions opt;
    opt.tol = tol;
    opt.compute_residual = false;

    std::vector<double> tgrid(n_t);
    for (int j = 0; j < n_t; ++j) tgrid[j] = T * (j + 1) / n_t;

    // reference (discontinuous) solves, shared across the ladder
    std::vector<ode::Trajectory> ref;
    std::vector<double> x0s(n_x0);
    for (int i = 0; i < n_x0; ++i) {
        x0s[i] = x_lo + (x_hi - x_lo) * i / (n_x0 - 1);
        ref.push_back(ode::solve_trajectory(z, lam, x0s[i], T, opt));
    }

    auto zero = [](double) { return 0.0; };
    bool weak_ok = true, strong_ok = true;
    for (double eps : eps_ladder) {
        const SmoothVelocity veps = mollify(v, eps);
        double rung_err = 0.0, rung_weak = 0.0, rung_strong = 0.0;
        for (int i = 0; i < n_x0; ++i) {
            const ode::Trajectory Xe = ode::solve_trajectory(veps, lam, x0s[i], T, opt);
            double err = 0.0;
            for (double t : tgrid) err = std::max(err, std::abs(Xe(t) - ref[i](t)));
            const auto b =
                ode::stability_bound(v, veps, lam, lam, x0s[i], x0s[i], T, T, zero);
            rung_err = std::max(rung_err, err);
            rung_weak = std::max(rung_weak, b.weak);
            rung_strong = std::max(rung_strong, b.strong);
            if (err > b.weak + 1e-9) weak_ok = false;
            if (err > b.strong + 1e-9) strong_ok = false;
        }
        chain.study.params.push_back(eps);
        chain.study.errors.push_back(rung_err);
        chain.weak_bounds.push_back(rung_weak);
        chain.strong_bounds.push_back(rung_strong);
    }
    chain.study.fit_rate();
    chain.weak_ok = weak_ok;
    chain.strong_ok = strong_ok;
    return chain;
}

ConvergenceStudy mollified_pde_chain(const nonlocal::Scenario& base,
                                     std::span<const double> eps_ladder,
                                     const std::vector<PiecewiseLinear>& test_functions,
                                     double tol) {
    const nonlocal::NonlocalSolution ref = nonlocal::fixed_point_solve(base, tol);
    ConvergenceStudy study;
    for (double eps : eps_ladder) {
        nonlocal::Scenario s = base;
        s.v_smooth = mollify(base.v, eps);
        // Initial datum mollified and re-sampled as exact cell averages on a
        // grid carrying the widened support.
        const MollifiedFn q0e = mollify(base.q0, eps);
        const auto [lo, hi] = base.q0_support();
        const int cells = base.grid.ny;
        std::vector<double> bps(cells + 1);
        for (int j = 0; j <= cells; ++j)
            bps[j] = (lo - eps) + (hi - lo + 2.0 * eps) * j / cells;
        std::vector<double> vals(cells + 2, 0.0);
        for (int j = 0; j < cells; ++j)
            vals[j + 1] = (q0e.primitive(bps[j + 1]) - q0e.primitive(bps[j])) /
                          (bps[j + 1] - bps[j]);
        s.q0 = PiecewiseConstantFn(bps, vals);
        const nonlocal::NonlocalSolution sol = nonlocal::fixed_point_solve(s, tol);
        double err = 0.0;
        for (const auto& g : test_functions)
            err = std::max(err, nonlocal::weak_error(sol, ref, g));
        study.params.push_back(eps);
        study.errors.push_back(err);
    }
    study.fit_rate();
    return study;
}

namespace {

PiecewiseConstantFn compose_pcf(const PiecewiseConstantFn& f, const PiecewiseLinear& g,
                                double a, double b) {
    // f o g on [a, b] for strictly increasing g: jumps at g^{-1}(beta)
    std::vector<double> bps;
    const double g_lo = std::min(g(a), g(b)), g_hi = std::max(g(a), g(b));
    for (double beta : f.breakpoints())
        if (beta > g_lo && beta < g_hi) {
            const double x = g.inverse(beta);
            if (x > a && x < b) bps.push_back(x);
        }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    std::vector<double> vals(bps.size() + 1);
    for (std::size_t i = 0; i <= bps.size(); ++i) {
        const double left = (i == 0) ? a : bps[i - 1];
        const double right = (i == bps.size()) ? b : bps[i];
        vals[i] = f(g(0.5 * (left + right)));
    }
    return PiecewiseConstantFn(std::move(bps), std::move(vals));
}

}  // namespace

CompositionReport composition_l1_check(const PiecewiseConstantFn& f, const PiecewiseLinear& g,
                                       const PiecewiseLinear& g_eps, double a, double b) {
    if (!g.strictly_increasing() || !g_eps.strictly_increasing())
        throw PreconditionViolation("composition_l1_check: maps must be strictly increasing");
    const PiecewiseConstantFn fg = compose_pcf(f, g, a, b);
    const PiecewiseConstantFn fge = compose_pcf(f, g_eps, a, b);
    CompositionReport rep;
    rep.observed_l1 = fg.l1_distance(fge, a, b);

    // ||g_eps^{-1} - g^{-1}||_inf over the value range; both inverses are
    // piecewise linear, so candidate extrema sit at the node values.
    std::vector<double> ys;
    for (double y : g.ys()) ys.push_back(y);
    for (double y : g_eps.ys()) ys.push_back(y);
    const double y_lo = std::min(g(a), g_eps(a));
    const double y_hi = std::max(g(b), g_eps(b));
    double sup_inv = 0.0;
    for (double y : ys)
        if (y >= y_lo && y <= y_hi)
            sup_inv = std::max(sup_inv, std::abs(g.inverse(y) - g_eps.inverse(y)));
    sup_inv = std::max(sup_inv, std::abs(g.inverse(y_lo) - g_eps.inverse(y_lo)));
    sup_inv = std::max(sup_inv, std::abs(g.inverse(y_hi) - g_eps.inverse(y_hi)));

    const double r_lo = std::min(g(a), g_eps(a)), r_hi = std::max(g(b), g_eps(b));
    rep.bound = f.total_variation(r_lo - 1e-12, r_hi + 1e-12) * sup_inv;
    return rep;
}

} // namespace discflow::verify
