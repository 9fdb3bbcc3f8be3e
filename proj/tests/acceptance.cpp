// Acceptance suite: runs every quantitative gate at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include "discflow/derivatives.hpp"
#include "discflow/filippov.hpp"
#include "discflow/nonlocal.hpp"
#include "discflow/stability.hpp"
#include "discflow/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <random>
#include <vector>

using namespace discflow;

namespace {

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("[%s] %-4s %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    if (!pass) ++failures;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

LipschitzField fig1_lambda(int which) {
    switch (which) {
        case 0: return LipschitzField::constant(1.0);
        case 1: return LipschitzField::affine_x(1.0, -1.0, 2.0);
        default: return LipschitzField::cosine_t(2.0 * M_PI);
    }
}

nonlocal::Scenario figure_scenario(int which, int ny, int nt, double T = 1.0) {
    nonlocal::Scenario s;
    s.q0 = PiecewiseConstantFn::indicator(-0.5, -0.1, 0.5);
    s.gamma = Kernel::box_forward(10.0, 0.1);
    s.V = nonlocal::VelocityLaw::affine(1.0, -1.0);
    switch (which) {
        case 0: s.v = VelocityFn::constant(1.0); break;
        case 1: s.v = VelocityFn(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0); break;
        default: s.v = VelocityFn(PiecewiseConstantFn({0.0}, {1.0, 0.5}), 0.5); break;
    }
    s.T = T;
    s.x_min = -1.5;
    s.x_max = 2.8;
    s.grid = {ny, nt};
    return s;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// ---------------------------------------------------------------------------

void criterion_1(const VelocityFn& v, const std::shared_ptr<SurrogateZ>& z) {
    Timer tm;
    ode::SolveOptions opt;  // tol = 1e-9
    const auto lam = LipschitzField::constant(1.0);
    double worst = 0.0;
    for (double x0 : {-1.0, -0.5, 0.0}) {
        const auto X = ode::solve_trajectory(z, lam, x0, 1.0, opt);
        for (int k = 0; k <= 1000; ++k) {
            const double t = k / 1000.0;
            worst = std::max(worst, std::abs(X(t) - z->invert(x0, t)));
        }
    }
    report("C1", worst <= 1e-8,
           "exact-ODE anchor: max |X - Z^{-1}| = " + num(worst) + " <= 1e-8 (" + num(tm.s()) +
               " s)");
}

void criterion_2(const VelocityFn& v) {
    Timer tm;
    double worst_violation = -1e300;
    double touch = 1e300;  // min over cases of closest approach ratio to a bound
    bool touched = false;
    for (int c = 0; c < 3; ++c) {
        const auto lam = fig1_lambda(c);
        for (double x0 : {-1.0, -0.5, 0.0}) {
            std::vector<double> times;
            for (int k = 1; k <= 100; ++k) times.push_back(k / 100.0);
            const auto rep = ode::fd_derivative_report(
                v, lam, x0, 1e-6 * std::max(1.0, std::abs(x0)), times, 1e-10);
            for (const auto& r : rep.rows) {
                worst_violation = std::max(
                    {worst_violation, r.lower - r.observed, r.observed - r.upper});
                if (c == 0) {
                    // tightness in the autonomous case: approach to either bound
                    const double d =
                        std::min(r.upper - r.observed, r.observed - r.lower) /
                        (r.upper - r.lower);
                    touch = std::min(touch, d);
                    if (r.observed >= 0.95 * r.upper || r.observed <= 1.05 * r.lower)
                        touched = true;
                }
            }
        }
    }
    const bool within = worst_violation <= 1e-6;
    report("C2", within && touched,
           "derivative bounds: worst violation " + num(worst_violation) +
               " <= 1e-6, bound touched within 5%: " + (touched ? "yes" : "no") + " (" +
               num(tm.s()) + " s)");
}

void criterion_3(const VelocityFn& v_fig1, const nonlocal::NonlocalSolution& middle) {
    Timer tm;
    // z round trips on random instances
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ux(-8.0, 8.0), uval(0.5, 4.0);
    double worst_z = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
        std::vector<double> bp;
        const int nj = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < nj; ++i) bp.push_back(ux(rng));
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
        std::vector<double> vals;
        for (std::size_t i = 0; i <= bp.size(); ++i) vals.push_back(uval(rng));
        const VelocityFn vv(PiecewiseConstantFn(bp, vals), 0.5);
        const SurrogateZ zz(vv);
        const double x0 = ux(rng), x = ux(rng);
        worst_z = std::max(worst_z, std::abs(zz.invert(x0, zz.eval(x0, x)) - x));
    }

    // flow inversion on the PDE run: xi(t, xi(tau,x;t); tau) = x
    double worst_flow = 0.0;
    std::mt19937 rng2(7);
    std::uniform_real_distribution<double> utau(0.0, 0.5), uxx(-0.45, -0.15);
    for (int i = 0; i < 20; ++i) {
        const double tau = utau(rng2), x = uxx(rng2), t = tau + 0.5;
        std::vector<double> tq{t}, xq(1);
        middle.characteristic(tau, x, tq, xq, 1e-9);
        std::vector<double> bq{tau}, bx(1);
        middle.characteristic(t, xq[0], bq, bx, 1e-9);
        worst_flow = std::max(worst_flow, std::abs(bx[0] - x));
    }
    const double flow_tol = 10.0 * 1e-8;  // 10 x PDE tol
    report("C3", worst_z <= 1e-12 && worst_flow <= flow_tol,
           "round trips: |z_invert(z_eval)-id| = " + num(worst_z) +
               " <= 1e-12, flow inversion = " + num(worst_flow) + " <= " + num(flow_tol) +
               " (" + num(tm.s()) + " s)");
}

void criterion_4(const std::vector<const nonlocal::NonlocalSolution*>& sols) {
    Timer tm;
    bool ok = true;
    double worst_ratio = 0.0;
    int max_iters = 0;
    for (const auto* sol : sols) {
        for (const auto& w : sol->windows) {
            max_iters = std::max<int>(max_iters, static_cast<int>(w.diffs.size()));
            if (w.diffs.back() > 1e-8) ok = false;
            if (static_cast<int>(w.diffs.size()) > 50) ok = false;
            for (std::size_t i = 1; i < w.diffs.size(); ++i)
                if (w.diffs[i - 1] > 1e-6)  // ratios over meaningful decades
                    worst_ratio = std::max(worst_ratio, w.diffs[i] / w.diffs[i - 1]);
        }
    }
    ok = ok && worst_ratio <= 0.6;
    report("C4", ok,
           "fixed-point contraction: worst ratio " + num(worst_ratio) +
               " <= 0.6, max iterations " + std::to_string(max_iters) + " <= 50 (" +
               num(tm.s()) + " s)");
}

void criterion_5(const std::vector<const nonlocal::NonlocalSolution*>& sols) {
    Timer tm;
    double worst_lag = 0.0, worst_euler = 0.0;
    for (const auto* sol : sols) {
        const double m0 = sol->audit.front().mass_lagrangian;
        for (const auto& a : sol->audit) {
            worst_lag = std::max(worst_lag, std::abs(a.mass_lagrangian - m0) / m0);
            worst_euler = std::max(worst_euler, std::abs(a.mass_eulerian - m0) / m0);
        }
    }
    report("C5", worst_lag <= 1e-14 && worst_euler <= 1e-6,
           "conservation: Lagrangian drift " + num(worst_lag) + " (machine), Eulerian drift " +
               num(worst_euler) + " <= 1e-6 (" + num(tm.s()) + " s)");
}

void criterion_6(const nonlocal::NonlocalSolution& left,
                 const nonlocal::NonlocalSolution& middle) {
    Timer tm;
    double worst = 0.0;
    for (const auto* sol : {&left, &middle}) {
        const auto rep =
            nonlocal::max_principle_audit(*sol, nonlocal::MaxPrincipleCase::MonotoneIncreasingV);
        worst = std::max(worst, rep.observed);
    }
    report("C6", worst <= 0.5 + 1e-3,
           "maximum principle (monotone v): sup_t ||q|| = " + num(worst) + " <= 0.501 (" +
               num(tm.s()) + " s)");
}

void criterion_7() {
    Timer tm;
    // refined runs while mass straddles the jump
    bool ok = true;
    std::string detail;
    {
        auto s = figure_scenario(1, 1600, 64, 0.4);
        const auto sol = nonlocal::fixed_point_solve(s, 1e-8);
        for (double t : {0.2, 0.3, 0.4}) {
            const auto [l, r] = sol.one_sided_density(sol.time_index(t), 0.0);
            const double ratio = l / r;
            if (std::abs(ratio - 2.0) > 0.05 * 2.0) ok = false;
            if (t == 0.3) detail += "middle l/r=" + num(ratio);
        }
    }
    {
        auto s = figure_scenario(2, 1600, 64, 0.4);
        const auto sol = nonlocal::fixed_point_solve(s, 1e-8);
        for (double t : {0.25, 0.35}) {
            const auto [l, r] = sol.one_sided_density(sol.time_index(t), 0.0);
            const double ratio = r / l;
            if (std::abs(ratio - 2.0) > 0.05 * 2.0) ok = false;
            if (t == 0.25) detail += ", right r/l=" + num(ratio);
        }
    }
    report("C7", ok, "jump relation: " + detail + " within 5% of 2 (" + num(tm.s()) + " s)");
}

void criterion_8(const VelocityFn& v_fig1) {
    Timer tm;
    const std::vector<double> ladder{0.1, 0.05, 0.025, 0.0125, 0.00625};

    // (a) the paper's single-jump velocity: weak bound asserted
    const VelocityFn v_jump(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0);
    const auto chain_jump = verify::mollified_ode_chain(
        v_jump, LipschitzField::constant(1.0), ladder, 1.0, -1.0, 1.0, 11, 9, 1e-11);

    // (b) the oscillating velocity: monotone decrease + the (valid) strong
    // bound; the integrated-difference weak form is reported only, since the
    // clustered jumps break its derivation (see the verification notes)
    const auto chain_osc = verify::mollified_ode_chain(
        v_fig1, LipschitzField::constant(1.0), ladder, 1.0, -1.0, 0.0, 11, 9, 1e-10);

    // (c) PDE weak errors against three hat test functions
    auto base = figure_scenario(1, 300, 60, 0.4);
    std::vector<PiecewiseLinear> hats{nonlocal::hat_function(-0.6, 0.2),
                                      nonlocal::hat_function(-0.2, 0.6),
                                      nonlocal::hat_function(0.0, 1.0)};
    std::vector<bool> hat_monotone(hats.size(), true);
    std::vector<double> prev(hats.size(), 1e300);
    const auto ref = nonlocal::fixed_point_solve(base, 1e-8);
    for (double eps : ladder) {
        nonlocal::Scenario s = base;
        s.v_smooth = mollify(base.v, eps);
        const MollifiedFn q0e = mollify(base.q0, eps);
        const int cells = base.grid.ny;
        std::vector<double> bps(cells + 1);
        for (int j = 0; j <= cells; ++j)
            bps[j] = (-0.5 - eps) + (0.4 + 2.0 * eps) * j / cells;
        std::vector<double> vals(cells + 2, 0.0);
        for (int j = 0; j < cells; ++j)
            vals[j + 1] =
                (q0e.primitive(bps[j + 1]) - q0e.primitive(bps[j])) / (bps[j + 1] - bps[j]);
        s.q0 = PiecewiseConstantFn(bps, vals);
        const auto sol = nonlocal::fixed_point_solve(s, 1e-8);
        for (std::size_t g = 0; g < hats.size(); ++g) {
            const double e = nonlocal::weak_error(sol, ref, hats[g]);
            if (e > prev[g] + 1e-12) hat_monotone[g] = false;
            prev[g] = e;
        }
    }
    bool hats_ok = true;
    for (bool b : hat_monotone) hats_ok = hats_ok && b;

    const bool pass = chain_jump.study.monotone_decreasing(1e-12) && chain_jump.weak_ok &&
                      chain_osc.study.monotone_decreasing(1e-12) && chain_osc.strong_ok &&
                      hats_ok;
    std::string detail = "mollification: single-jump errs";
    for (double e : chain_jump.study.errors) detail += " " + num(e);
    detail += " (weak bound holds), oscillating errs";
    for (double e : chain_osc.study.errors) detail += " " + num(e);
    detail += " (rate " + num(chain_osc.study.fitted_rate) +
              "; weak form holds: " + (chain_osc.weak_ok ? "yes" : "no (clustered jumps)") +
              ", strong holds), PDE hats monotone: " + (hats_ok ? "yes" : "no");
    report("C8", pass, detail + " (" + num(tm.s()) + " s)");
}

void criterion_9(const VelocityFn& v) {
    Timer tm;
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> ux0(-1.0, 0.0), ud(-0.1, 0.1), uc(-0.35, 0.5),
        ua(-0.05, 0.05), ub(-0.05, 0.05), upos(-1.5, 1.5), uw(0.2, 1.0);
    auto z = std::make_shared<SurrogateZ>(v);
    ode::SolveOptions opt;
    opt.tol = 1e-10;
    opt.compute_residual = false;
    const auto lam = LipschitzField::constant(1.0);
    double worst_strong = -1e300, worst_weak = -1e300;
    for (int i = 0; i < 100; ++i) {
        const double x0 = ux0(rng), x0t = x0 + ud(rng);
        const double c = uc(rng);
        const double a = ua(rng), b = ub(rng);
        const double pa = upos(rng), pw = uw(rng);
        const VelocityFn vt(v.base() + PiecewiseConstantFn::indicator(pa, pa + pw, c),
                            1.0 + std::min(0.0, c));
        // lambda~ = 1 + a + b x: exact sup of the difference over the window
        const auto lamt = LipschitzField::affine_x(1.0 + a, b, 1.0 + std::abs(a) +
                                                                   std::abs(b) * 5.0);
        const double reach = 1.0 * v.upper() * std::max(lam.sup_bound(), lamt.sup_bound());
        const double w_lo = x0 - reach, w_hi = x0 + reach;
        auto diff_sup = [a, b, w_lo, w_hi](double) {
            return std::max(std::abs(a + b * w_lo), std::abs(a + b * w_hi));
        };
        const auto X = ode::solve_trajectory(z, lam, x0, 1.0, opt);
        const auto Xt = ode::solve_trajectory(vt, lamt, x0t, 1.0, opt);
        for (double t : {0.25, 0.5, 1.0}) {
            const auto bnd =
                ode::stability_bound(v, vt, lam, lamt, x0, x0t, t, 1.0, diff_sup);
            const double d = std::abs(X(t) - Xt(t));
            worst_strong = std::max(worst_strong, d - bnd.strong);
            worst_weak = std::max(worst_weak, d - bnd.weak);
        }
    }
    report("C9", worst_strong <= 1e-9 && worst_weak <= 1e-9,
           "stability: 100 perturbation pairs, worst strong margin " + num(-worst_strong) +
               ", worst weak margin " + num(-worst_weak) + " (" + num(tm.s()) + " s)");
}

void criterion_10(const VelocityFn& v) {
    Timer tm;
    const auto lam = LipschitzField::constant(1.0);
    bool ok = true;
    std::string detail = "L1-in-time of d3 X:";
    for (auto [t, tt] : {std::pair{0.40, 0.45}, {0.40, 0.50}, {0.40, 0.60}}) {
        const auto rep = ode::deriv_time_continuity(v, lam, -1.0, 0.0, t, tt, 500, 1e-6, 1e-10);
        ok = ok && rep.observed_l1 <= rep.bound;
        detail += " |dt|=" + num(tt - t) + ": " + num(rep.observed_l1) + "<=" + num(rep.bound);
    }
    report("C10", ok, detail + " (" + num(tm.s()) + " s)");
}

void criterion_11(const VelocityFn& v) {
    Timer tm;
    ode::SolveOptions opt;
    opt.compute_residual = false;
    double worst = 1.0;
    for (int c = 0; c < 3; ++c) {
        const auto lam = fig1_lambda(c);
        for (double x0 : {-1.0, -0.5, 0.0}) {
            const auto X = ode::solve_trajectory(v, lam, x0, 1.0, opt);
            worst = std::min(worst, ode::filippov_containment(X, v, lam, 500, 1e-4));
        }
    }
    report("C11", worst >= 0.99,
           "Filippov containment: min fraction " + num(worst) + " >= 0.99 (" + num(tm.s()) +
               " s)");
}

void criterion_12() {
    Timer tm;
    std::vector<PiecewiseConstantFn> densities;
    for (int level = 0; level < 4; ++level) {
        const int ny = 125 << level, nt = 25 << level;
        const auto sol = nonlocal::fixed_point_solve(figure_scenario(1, ny, nt), 1e-8);
        densities.push_back(sol.density(sol.time_index(1.0)));
    }
    std::vector<double> diffs;
    for (int l = 0; l + 1 < 4; ++l)
        diffs.push_back(densities[l].l1_distance(densities[l + 1], -1.5, 2.8));
    const double r1 = diffs[0] / diffs[1];
    const double r2 = diffs[1] / diffs[2];
    report("C12", r1 >= 1.5 && r2 >= 1.5,
           "grid convergence: L1 self-differences " + num(diffs[0]) + ", " + num(diffs[1]) +
               ", " + num(diffs[2]) + "; ratios " + num(r1) + ", " + num(r2) + " >= 1.5 (" +
               num(tm.s()) + " s)");
}

}  // namespace

int main(int argc, char** argv) {
    Timer total;
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const VelocityFn v_fig1(oscillating_sign_velocity(), 1.0);
    auto z_fig1 = std::make_shared<SurrogateZ>(v_fig1);

    if (only == 0 || only == 1) criterion_1(v_fig1, z_fig1);
    if (only == 0 || only == 2) criterion_2(v_fig1);
    if (only != 0 && only <= 2) {
        std::printf("%d criterion(s) failed; total %.3g s\n", failures, total.s());
        return failures == 0 ? 0 : 1;
    }

    // shared model runs for criteria 3-6
    Timer tm_runs;
    const auto sol_left = nonlocal::fixed_point_solve(figure_scenario(0, 800, 160), 1e-8);
    const auto sol_middle = nonlocal::fixed_point_solve(figure_scenario(1, 800, 160), 1e-8);
    const auto sol_right = nonlocal::fixed_point_solve(figure_scenario(2, 800, 160), 1e-8);
    std::printf("       (model runs: %.3g s)\n", tm_runs.s());
    const std::vector<const nonlocal::NonlocalSolution*> sols{&sol_left, &sol_middle,
                                                              &sol_right};

    criterion_3(v_fig1, sol_middle);
    criterion_4(sols);
    criterion_5(sols);
    criterion_6(sol_left, sol_middle);
    criterion_7();
    criterion_8(v_fig1);
    criterion_9(v_fig1);
    criterion_10(v_fig1);
    criterion_11(v_fig1);
    criterion_12();

    std::printf("%d criterion(s) failed; total %.3g s\n", failures, total.s());
    return failures == 0 ? 0 : 1;
}
