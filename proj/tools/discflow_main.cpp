#include "discflow/csv.hpp"
#include "discflow/derivatives.hpp"
#include "discflow/filippov.hpp"
#include "discflow/json_io.hpp"
#include "discflow/nonlocal.hpp"
#include "discflow/stability.hpp"
#include "discflow/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

using namespace discflow;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInvariant = 1;
constexpr int kExitBound = 2;
constexpr int kExitIntegration = 3;
constexpr int kExitUsage = 64;

struct CommonOpts {
    std::string scenario;
    std::string out = "out";
    double tol = 0.0;  // 0 = keep scenario/default value
    int ny = 0;
    int nt = 0;
    unsigned seed = 1;
};

std::string out_path(const CommonOpts& o, const std::string& name) {
    return (fs::path(o.out) / name).string();
}

// ---------------------------------------------------------------------------
// ode

int cmd_ode(const CommonOpts& o) {
    OdeScenario sc = ode_scenario_from_file(o.scenario);
    if (o.tol > 0.0) sc.tol = o.tol;

    auto z = std::make_shared<SurrogateZ>(sc.v);
    ode::SolveOptions opt;
    opt.tol = sc.tol;

    const int n_t = 200;
    std::vector<std::vector<double>> traj_rows(n_t + 1);
    std::vector<std::string> header{"t"};
    for (int k = 0; k <= n_t; ++k) traj_rows[k].push_back(sc.T * k / n_t);

    std::vector<std::vector<double>> bound_rows;
    bool bounds_ok = true, residual_ok = true;

    for (double x0 : sc.x0) {
        header.push_back("x_" + format_double(x0));
        const auto X = ode::solve_trajectory(z, sc.lambda, x0, sc.T, opt);
        residual_ok = residual_ok && X.residual() <= 10.0 * sc.tol;
        for (int k = 0; k <= n_t; ++k) traj_rows[k].push_back(X(traj_rows[k][0]));

        const double h = 1e-6 * std::max(1.0, std::abs(x0));
        std::vector<double> times;
        for (int k = 1; k <= 50; ++k) times.push_back(sc.T * k / 50);
        const auto rep = ode::fd_derivative_report(sc.v, sc.lambda, x0, h, times, sc.tol);
        for (const auto& r : rep.rows) {
            bound_rows.push_back({r.t, x0, r.observed, r.lower, r.upper});
            if (r.observed < r.lower - 1e-6 || r.observed > r.upper + 1e-6) bounds_ok = false;
        }
    }
    write_csv(out_path(o, "trajectories.csv"), header, traj_rows);
    write_csv(out_path(o, "derivative_bounds.csv"), {"t", "x0", "fd_ratio", "lower", "upper"},
              bound_rows);
    if (!residual_ok || !bounds_ok) {
        std::cerr << "ode: " << (!residual_ok ? "residual" : "derivative bound")
                  << " check failed\n";
        return kExitBound;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// pde

int run_pde_scenario(const nonlocal::Scenario& s, const CommonOpts& o,
                     const std::string& prefix) {
    const double tol = o.tol > 0.0 ? o.tol : 1e-8;
    const auto sol = nonlocal::fixed_point_solve(s, tol);

    // density snapshots at t in {0, T/2, T}
    std::vector<std::size_t> snaps{0, sol.time_index(0.5 * s.T), sol.time_index(s.T)};
    std::vector<std::string> header{"x"};
    for (std::size_t k : snaps) header.push_back("q_t" + format_double(sol.chars.times[k]));
    const auto base = sol.eulerian_samples(snaps[0], 400);
    std::vector<std::vector<double>> rows(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) rows[i].push_back(base[i].first);
    for (std::size_t k : snaps) {
        const auto samples = sol.eulerian_samples(k, 400);
        for (std::size_t i = 0; i < samples.size(); ++i) rows[i].push_back(samples[i].second);
    }
    write_csv(out_path(o, prefix + "density.csv"), header, rows);

    std::vector<std::vector<double>> audit_rows;
    for (const auto& a : sol.audit) audit_rows.push_back({a.t, a.sup, a.mass_eulerian, a.tv});
    write_csv(out_path(o, prefix + "audit.csv"), {"t", "max", "mass", "tv"}, audit_rows);

    // audits: conservation always; the classical max principle when v is
    // monotone under the traffic assumptions
    const double m0 = sol.audit.front().mass_lagrangian;
    for (const auto& a : sol.audit) {
        if (std::abs(a.mass_eulerian - m0) > 1e-6 * std::max(1.0, std::abs(m0))) {
            std::cerr << "pde: mass drift at t=" << a.t << "\n";
            return kExitBound;
        }
    }
    if (s.V.deriv() <= 0.0 && s.q0.min_value() >= 0.0 && s.gamma.monotone_decreasing() &&
        s.v.base().is_nondecreasing()) {
        const auto rep =
            nonlocal::max_principle_audit(sol, nonlocal::MaxPrincipleCase::MonotoneIncreasingV);
        if (rep.margin < -1e-3) {
            std::cerr << "pde: maximum principle breach (observed " << rep.observed
                      << " vs bound " << rep.bound << ")\n";
            return kExitBound;
        }
    }
    return 0;
}

int cmd_pde(const CommonOpts& o) {
    nonlocal::Scenario s = scenario_from_file(o.scenario);
    if (o.ny > 0) s.grid.ny = o.ny;
    if (o.nt > 0) s.grid.nt = o.nt;
    return run_pde_scenario(s, o, "");
}

// ---------------------------------------------------------------------------
// verify suites

nonlocal::Scenario figure_scenario(int which, int ny, int nt) {
    nonlocal::Scenario s;
    s.q0 = PiecewiseConstantFn::indicator(-0.5, -0.1, 0.5);
    s.gamma = Kernel::box_forward(10.0, 0.1);
    s.V = nonlocal::VelocityLaw::affine(1.0, -1.0);
    switch (which) {
        case 0: s.v = VelocityFn::constant(1.0); break;
        case 1: s.v = VelocityFn(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0); break;
        default: s.v = VelocityFn(PiecewiseConstantFn({0.0}, {1.0, 0.5}), 0.5); break;
    }
    s.T = 1.0;
    s.x_min = -1.5;
    s.x_max = 2.8;
    s.grid = {ny, nt};
    return s;
}

LipschitzField fig1_lambda(int which) {
    switch (which) {
        case 0: return LipschitzField::constant(1.0);
        case 1: return LipschitzField::affine_x(1.0, -1.0, 2.0);
        default: return LipschitzField::cosine_t(2.0 * M_PI);
    }
}

struct Invariant {
    std::string name;
    double observed, bound;
    bool pass;
};

int emit_report(const CommonOpts& o, const std::string& suite,
                const std::vector<Invariant>& inv) {
    nlohmann::json j;
    j["suite"] = suite;
    bool all = true;
    for (const auto& i : inv) {
        j["invariants"].push_back({{"name", i.name},
                                   {"observed", i.observed},
                                   {"bound", i.bound},
                                   {"pass", i.pass}});
        all = all && i.pass;
    }
    j["pass"] = all;
    write_text_atomic(out_path(o, "verify_" + suite + ".json"), j.dump(2) + "\n");
    std::cout << "suite " << suite << ": " << (all ? "pass" : "FAIL") << "\n";
    return all ? 0 : kExitInvariant;
}

int cmd_verify(const CommonOpts& o, const std::string& suite) {
    std::vector<Invariant> inv;
    const VelocityFn v_osc(oscillating_sign_velocity(), 1.0);

    if (suite == "ode-bounds") {
        for (int c = 0; c < 3; ++c) {
            const auto lam = fig1_lambda(c);
            for (double x0 : {-1.0, -0.5, 0.0}) {
                std::vector<double> times;
                for (int k = 1; k <= 25; ++k) times.push_back(k / 25.0);
                const auto rep = ode::fd_derivative_report(
                    v_osc, lam, x0, 1e-6 * std::max(1.0, std::abs(x0)), times);
                double worst = 0.0;
                for (const auto& r : rep.rows)
                    worst = std::max({worst, r.lower - r.observed, r.observed - r.upper});
                inv.push_back({"fd_within_bounds(case=" + std::to_string(c) +
                                   ",x0=" + format_double(x0) + ")",
                               worst, 1e-6, worst <= 1e-6});
            }
        }
    } else if (suite == "stability") {
        std::mt19937 rng(o.seed);
        std::uniform_real_distribution<double> ud(-0.1, 0.1), uc(-0.3, 0.5), ua(-0.05, 0.05);
        const auto lam = LipschitzField::constant(1.0);
        auto z = std::make_shared<SurrogateZ>(v_osc);
        ode::SolveOptions opt;
        opt.tol = 1e-10;
        opt.compute_residual = false;
        double worst = -1.0;
        for (int i = 0; i < 25; ++i) {
            const double x0 = -0.8, x0t = x0 + ud(rng);
            const double c = uc(rng), a = ua(rng);
            const VelocityFn vt(v_osc.base() + PiecewiseConstantFn::indicator(-2.0, 2.0, c),
                                1.0 + std::min(0.0, c));
            const auto lamt = LipschitzField::constant(1.0 + a);
            const auto X = ode::solve_trajectory(z, lam, x0, 1.0, opt);
            const auto Xt = ode::solve_trajectory(vt, lamt, x0t, 1.0, opt);
            auto diff_sup = [a](double) { return std::abs(a); };
            for (double t : {0.25, 0.5, 1.0}) {
                const auto b = ode::stability_bound(v_osc, vt, lam, lamt, x0, x0t, t, 1.0,
                                                    diff_sup);
                worst = std::max(worst, std::abs(X(t) - Xt(t)) - b.strong);
            }
        }
        inv.push_back({"strong_bound_holds", worst, 0.0, worst <= 1e-9});
    } else if (suite == "mollify") {
        const std::vector<double> ladder{0.1, 0.05, 0.025, 0.0125};
        const auto chain = verify::mollified_ode_chain(
            v_osc, LipschitzField::constant(1.0), ladder, 0.5, -1.0, -0.2, 9, 9, 1e-10);
        inv.push_back({"monotone_decrease", chain.study.monotone_decreasing() ? 0.0 : 1.0, 0.0,
                       chain.study.monotone_decreasing()});
        inv.push_back({"strong_bounds", chain.strong_ok ? 0.0 : 1.0, 0.0, chain.strong_ok});
    } else if (suite == "filippov") {
        ode::SolveOptions opt;
        opt.compute_residual = false;
        for (double x0 : {-1.0, -0.5, 0.0}) {
            const auto lam = LipschitzField::constant(1.0);
            const auto X = ode::solve_trajectory(v_osc, lam, x0, 1.0, opt);
            const double frac = ode::filippov_containment(X, v_osc, lam, 400, 1e-4);
            inv.push_back({"containment(x0=" + format_double(x0) + ")", frac, 0.99,
                           frac >= 0.99});
        }
    } else if (suite == "pde-audit") {
        const int ny = o.ny > 0 ? o.ny : 400;
        const int nt = o.nt > 0 ? o.nt : 80;
        for (int which = 0; which < 3; ++which) {
            const auto s = figure_scenario(which, ny, nt);
            const auto sol = nonlocal::fixed_point_solve(s, o.tol > 0 ? o.tol : 1e-8);
            double drift = 0.0;
            const double m0 = sol.audit.front().mass_lagrangian;
            for (const auto& a : sol.audit)
                drift = std::max(drift, std::abs(a.mass_eulerian - m0) / m0);
            inv.push_back({"mass_drift(v=" + std::to_string(which) + ")", drift, 1e-6,
                           drift <= 1e-6});
            double ratio = 0.0;
            for (const auto& w : sol.windows)
                for (std::size_t i = 1; i < w.diffs.size(); ++i)
                    if (w.diffs[i - 1] > 1e-6)
                        ratio = std::max(ratio, w.diffs[i] / w.diffs[i - 1]);
            inv.push_back({"contraction_ratio(v=" + std::to_string(which) + ")", ratio, 0.6,
                           ratio <= 0.6});
        }
    } else if (suite == "composition") {
        auto z = std::make_shared<SurrogateZ>(v_osc);
        const int n = 400;
        std::vector<double> xs(n + 1), y1(n + 1), y2(n + 1);
        for (int i = 0; i <= n; ++i) {
            xs[i] = -1.0 + 2.0 * i / n;
            y1[i] = z->invert(xs[i], 0.4);
            y2[i] = z->invert(xs[i], 0.45);
        }
        const auto rep = verify::composition_l1_check(v_osc.base(), PiecewiseLinear(xs, y1),
                                                      PiecewiseLinear(xs, y2), -1.0, 0.0);
        inv.push_back({"l1_within_tv_bound", rep.observed_l1, rep.bound,
                       rep.observed_l1 <= rep.bound + 1e-9});
    } else {
        std::cerr << "unknown suite '" << suite
                  << "' (expected ode-bounds|stability|mollify|filippov|pde-audit|composition)\n";
        return kExitUsage;
    }
    return emit_report(o, suite, inv);
}

// ---------------------------------------------------------------------------
// figures: canned data for the three model runs

int cmd_figures(const CommonOpts& o) {
    // discontinuous IVP: nine trajectories (three fields, three initial points)
    const VelocityFn v_osc(oscillating_sign_velocity(), 1.0);
    auto z = std::make_shared<SurrogateZ>(v_osc);
    ode::SolveOptions opt;
    opt.tol = o.tol > 0 ? o.tol : 1e-9;

    const int n_t = 400;
    std::vector<std::string> header{"t"};
    std::vector<std::vector<double>> rows(n_t + 1);
    for (int k = 0; k <= n_t; ++k) rows[k].push_back(k / static_cast<double>(n_t));
    std::vector<std::vector<double>> brows;
    const char* tags[3] = {"const", "affine", "cos"};
    for (int c = 0; c < 3; ++c) {
        const auto lam = fig1_lambda(c);
        for (double x0 : {-1.0, -0.5, 0.0}) {
            header.push_back(std::string("x_") + tags[c] + "_" + format_double(x0));
            const auto X = ode::solve_trajectory(z, lam, x0, 1.0, opt);
            for (int k = 0; k <= n_t; ++k) rows[k].push_back(X(rows[k][0]));
            std::vector<double> times;
            for (int k = 1; k <= 100; ++k) times.push_back(k / 100.0);
            const auto rep = ode::fd_derivative_report(v_osc, lam, x0,
                                                       1e-6 * std::max(1.0, std::abs(x0)),
                                                       times, opt.tol);
            for (const auto& r : rep.rows)
                brows.push_back({static_cast<double>(c), x0, r.t, r.observed, r.lower, r.upper});
        }
    }
    write_csv(out_path(o, "fig1_trajectories.csv"), header, rows);
    write_csv(out_path(o, "fig1_bounds.csv"), {"case", "x0", "t", "fd_ratio", "lower", "upper"},
              brows);

    const char* names[3] = {"fig2_left_", "fig2_middle_", "fig2_right_"};
    const int ny = o.ny > 0 ? o.ny : 800;
    const int nt = o.nt > 0 ? o.nt : 160;
    for (int which = 0; which < 3; ++which) {
        const int rc = run_pde_scenario(figure_scenario(which, ny, nt), o, names[which]);
        if (rc != 0) return rc;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver and verifiers for nonlocal conservation laws with a "
                 "discontinuous velocity"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string suite;

    auto add_common = [&o](CLI::App* cmd, bool need_scenario) {
        if (need_scenario)
            cmd->add_option("--scenario", o.scenario, "scenario JSON path")->required();
        cmd->add_option("--out", o.out, "output directory");
        cmd->add_option("--tol", o.tol, "tolerance override")
            ->check(CLI::Range(1e-12, 1e-2));
        cmd->add_option("--ny", o.ny, "Lagrangian cells override");
        cmd->add_option("--nt", o.nt, "output times override");
        cmd->add_option("--seed", o.seed, "seed for sampling-based checks");
    };

    auto* ode_cmd = app.add_subcommand("ode", "solve a discontinuous IVP scenario");
    add_common(ode_cmd, true);
    auto* pde_cmd = app.add_subcommand("pde", "solve a nonlocal conservation-law scenario");
    add_common(pde_cmd, true);
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("suite", suite, "suite name")->required();
    add_common(verify_cmd, false);
    auto* fig_cmd = app.add_subcommand("figures", "emit the canned model-run data");
    add_common(fig_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (ode_cmd->parsed()) return cmd_ode(o);
        if (pde_cmd->parsed()) return cmd_pde(o);
        if (verify_cmd->parsed()) return cmd_verify(o, suite);
        if (fig_cmd->parsed()) return cmd_figures(o);
    } catch (const IntegrationFailure& e) {
        std::cerr << "integration failure: " << e.what() << "\n";
        return kExitIntegration;
    } catch (const NonContraction& e) {
        std::cerr << "fixed point did not contract: " << e.what() << " (history:";
        for (double d : e.history) std::cerr << " " << d;
        std::cerr << ")\n";
        return kExitBound;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBound;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
