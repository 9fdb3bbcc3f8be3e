#include "discflow/ode.hpp"

#include <algorithm>
#include <cmath>

namespace discflow::ode {

CaratheodoryCurve::CaratheodoryCurve(std::vector<Dopri5Step> steps, double T, double end_value)
    : steps_(std::move(steps)), T_(T), end_(end_value) {}

double CaratheodoryCurve::operator()(double t) const {
    if (steps_.empty()) return end_;
    if (t <= steps_.front().t) return steps_.front().y;
    if (t >= T_) return end_;
    // first step whose start exceeds t, then back up one
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double tt, const Dopri5Step& s) { return tt < s.t; });
    const Dopri5Step& s = *(it - 1);
    return dense_eval(s, t);
}

namespace {

/// Integrate with mandatory stops at the field's declared time breakpoints.
template <class F>
CaratheodoryCurve integrate_curve(F&& rhs, const LipschitzField& lam, double T, double tol) {
    std::vector<Dopri5Step> steps;
    steps.reserve(64);
    auto obs = [&steps](const Dopri5Step& s) { steps.push_back(s); };
    double t = 0.0, y = 0.0;
    std::vector<double> stops;
    for (double b : lam.time_breaks())
        if (b > 0.0 && b < T) stops.push_back(b);
    stops.push_back(T);
    // Step cap: kinks of the right-hand side (breakpoint crossings) are not
    // event-located; a bounded step keeps the controller's estimate honest.
    const double h_max = T / 64.0;
    for (double s : stops) {
        y = dopri5_integrate(rhs, t, y, s, tol, {}, {}, obs, h_max);
        t = s;
    }
    return CaratheodoryCurve(std::move(steps), T, y);
}

double trajectory_residual(const Trajectory& X, const LipschitzField& lam, double T, double tol,
                           int n_grid) {
    // A-posteriori defect of the weak identity: Z(x0; X(t)) must match the
    // independently quadratured int_0^t lambda(s, X(s)) ds. Z(x0; X(t)) is the
    // transformed curve itself for surrogate solves; for direct solves the
    // 1/v-integral is quadratured too.
    std::vector<double> grid(n_grid + 1);
    for (int k = 0; k <= n_grid; ++k) grid[k] = T * k / n_grid;
    for (double b : lam.time_breaks())
        if (b > 0.0 && b < T) grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto g = [&](double s) { return lam(s, X(s)); };
    const double qtol = 0.05 * tol / grid.size();
    double acc = 0.0, worst = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        acc += adaptive_simpson(g, grid[k - 1], grid[k], qtol);
        const double lhs = X.z().eval(X.x0(), X(grid[k]));
        worst = std::max(worst, std::abs(lhs - acc));
    }
    return worst;
}

double smooth_residual(const Trajectory& X, const SmoothVelocity& v, const LipschitzField& lam,
                       double T, double tol, int n_grid) {
    std::vector<double> grid(n_grid + 1);
    for (int k = 0; k <= n_grid; ++k) grid[k] = T * k / n_grid;
    auto g = [&](double s) { return lam(s, X(s)); };
    auto inv_v = [&](double x) { return 1.0 / v(x); };
    const double qtol = 0.02 * tol / grid.size();
    double acc = 0.0, worst = 0.0;
    for (int k = 1; k <= n_grid; ++k) {
        acc += adaptive_simpson(g, grid[k - 1], grid[k], qtol);
        const double lhs = adaptive_simpson(inv_v, X.x0(), X(grid[k]), qtol * 10.0);
        worst = std::max(worst, std::abs(lhs - acc));
    }
    return worst;
}

}  // namespace

CaratheodoryCurve solve_caratheodory(const SurrogateZ& z, const LipschitzField& lam, double x0,
                                     double T, double tol) {
    if (!(T > 0.0) || !(tol > 0.0))
        throw InvalidParameter("solve_caratheodory: need T > 0 and tol > 0");
    const double u0 = z.prim(x0);
    auto rhs = [&z, &lam, u0](double t, double c) { return lam(t, z.prim_inverse(c + u0)); };
    return integrate_curve(rhs, lam, T, tol);
}

CaratheodoryCurve solve_caratheodory(const VelocityFn& v, const LipschitzField& lam, double x0,
                                     double T, double tol) {
    SurrogateZ z(v);
    return solve_caratheodory(z, lam, x0, T, tol);
}

Trajectory solve_trajectory(std::shared_ptr<const SurrogateZ> z, const LipschitzField& lam,
                            double x0, double T, const SolveOptions& opt) {
    Trajectory X;
    X.z_ = std::move(z);
    X.x0_ = x0;
    X.u0_ = X.z_->prim(x0);
    X.T_ = T;
    X.curve_ = solve_caratheodory(*X.z_, lam, x0, T, opt.tol);
    X.lip_t_ = X.z_->v_upper() * lam.sup_bound();
    if (opt.compute_residual)
        X.residual_ = trajectory_residual(X, lam, T, opt.tol, opt.verify_grid);
    return X;
}

Trajectory solve_trajectory(const VelocityFn& v, const LipschitzField& lam, double x0, double T,
                            const SolveOptions& opt) {
    return solve_trajectory(std::make_shared<SurrogateZ>(v), lam, x0, T, opt);
}

Trajectory solve_trajectory(const SmoothVelocity& v, const LipschitzField& lam, double x0,
                            double T, const SolveOptions& opt) {
    if (!(T > 0.0) || !(opt.tol > 0.0))
        throw InvalidParameter("solve_trajectory: need T > 0 and tol > 0");
    Trajectory X;
    X.x0_ = x0;
    X.T_ = T;
    auto rhs = [&v, &lam](double t, double x) { return v(x) * lam(t, x); };
    std::vector<Dopri5Step> steps;
    auto obs = [&steps](const Dopri5Step& s) { steps.push_back(s); };
    double t = 0.0, y = x0;
    std::vector<double> stops;
    for (double b : lam.time_breaks())
        if (b > 0.0 && b < T) stops.push_back(b);
    stops.push_back(T);
    const double h_max = T / 64.0;
    for (double s : stops) {
        y = dopri5_integrate(rhs, t, y, s, opt.tol, {}, {}, obs, h_max);
        t = s;
    }
    X.curve_ = CaratheodoryCurve(std::move(steps), T, y);
    X.lip_t_ = v.upper() * lam.sup_bound();
    if (opt.compute_residual)
        X.residual_ = smooth_residual(X, v, lam, T, opt.tol, std::min(opt.verify_grid, 64));
    return X;
}

double Trajectory::operator()(double t) const {
    const double c = curve_(t);
    return z_ ? z_->prim_inverse(c + u0_) : c;
}

namespace {

template <class Rhs, class Map>
void characteristic_impl(Rhs&& rhs, Map&& to_x, double y_init, const LipschitzField& lam,
                         double t_anchor, std::span<const double> times, std::span<double> out,
                         double tol) {
    // Split the ascending query list at the anchor, integrate backward over the
    // earlier part and forward over the later part, honoring field breakpoints.
    std::size_t split = 0;
    while (split < times.size() && times[split] < t_anchor) ++split;

    auto run = [&](std::span<const double> q, std::span<double> o, bool backward) {
        if (q.empty()) return;
        const double t_end = q.back();
        const double h_max = std::max(std::abs(t_end - t_anchor) / 64.0, 1e-14);
        std::vector<double> stops;
        for (double b : lam.time_breaks()) {
            if (backward ? (b < t_anchor && b > t_end) : (b > t_anchor && b < t_end))
                stops.push_back(b);
        }
        if (backward)
            std::sort(stops.begin(), stops.end(), std::greater<>());
        else
            std::sort(stops.begin(), stops.end());
        stops.push_back(t_end);
        double t = t_anchor, y = y_init;
        std::size_t qi = 0;
        for (double s : stops) {
            std::size_t qj = qi;
            while (qj < q.size() && (backward ? q[qj] >= s : q[qj] <= s)) ++qj;
            y = dopri5_integrate(rhs, t, y, s, tol, q.subspan(qi, qj - qi),
                                 o.subspan(qi, qj - qi), h_max);
            qi = qj;
            t = s;
        }
        while (qi < q.size()) o[qi++] = y;
    };

    if (split > 0) {
        std::vector<double> qb(times.begin(), times.begin() + split);
        std::reverse(qb.begin(), qb.end());
        std::vector<double> outb(qb.size());
        run(qb, outb, true);
        for (std::size_t i = 0; i < qb.size(); ++i) out[split - 1 - i] = to_x(outb[i]);
    }
    if (split < times.size()) {
        std::vector<double> qf(times.begin() + split, times.end());
        std::vector<double> outf(qf.size());
        run(qf, outf, false);
        for (std::size_t i = 0; i < qf.size(); ++i) out[split + i] = to_x(outf[i]);
    }
}

}  // namespace

void characteristic_at(const SurrogateZ& z, const LipschitzField& lam, double t_anchor,
                       double x_anchor, std::span<const double> times, std::span<double> out,
                       double tol) {
    const double u0 = z.prim(x_anchor);
    auto rhs = [&z, &lam, u0](double t, double c) { return lam(t, z.prim_inverse(c + u0)); };
    auto to_x = [&z, u0](double c) { return z.prim_inverse(c + u0); };
    characteristic_impl(rhs, to_x, 0.0, lam, t_anchor, times, out, tol);
}

void characteristic_at(const SmoothVelocity& v, const LipschitzField& lam, double t_anchor,
                       double x_anchor, std::span<const double> times, std::span<double> out,
                       double tol) {
    auto rhs = [&v, &lam](double t, double x) { return v(x) * lam(t, x); };
    auto to_x = [](double x) { return x; };
    characteristic_impl(rhs, to_x, x_anchor, lam, t_anchor, times, out, tol);
}

} // namespace discflow::ode
