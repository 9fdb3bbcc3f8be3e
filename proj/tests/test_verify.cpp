#include <doctest.h>

#include "discflow/verify.hpp"

#include <cmath>

using namespace discflow;
using namespace discflow::verify;

TEST_CASE("brute force oracle") {
    SUBCASE("unit transport is exact") {
        const auto bf = brute_force_trajectory(VelocityFn::constant(1.0),
                                               LipschitzField::constant(1.0), -0.2, 1.0, 100000);
        // 1e5 fixed steps accumulate ~n*ulp roundoff even on an exact field
        for (double t : {0.25, 0.5, 1.0})
            CHECK(std::abs(bf.value_at(t) - (-0.2 + t)) <= 1e-10);
    }
    SUBCASE("linear closed form to oracle accuracy") {
        const auto bf = brute_force_trajectory(VelocityFn::constant(2.0),
                                               LipschitzField::affine_x(1.0, -1.0, 1.0), 0.0,
                                               1.0, 100000);
        for (double t : {0.25, 0.5, 1.0})
            CHECK(std::abs(bf.value_at(t) - (1.0 - std::exp(-2.0 * t))) <= 1e-10);
    }
    SUBCASE("agrees with the adaptive solver on the oscillating case") {
        const VelocityFn v(oscillating_sign_velocity(), 1.0);
        const auto lam = LipschitzField::affine_x(1.0, -0.5, 3.0);
        const auto bf = brute_force_trajectory(v, lam, -1.0, 1.0, 200000, 64);
        ode::SolveOptions opt;
        opt.tol = 1e-10;
        opt.compute_residual = false;
        const auto X = ode::solve_trajectory(v, lam, -1.0, 1.0, opt);
        for (int k = 0; k <= 64; ++k) {
            const double t = k / 64.0;
            CHECK(std::abs(bf.value_at(t) - X(t)) <= 1e-7);
        }
    }
    SUBCASE("step floor is enforced") {
        CHECK_THROWS_AS(brute_force_trajectory(VelocityFn::constant(1.0),
                                               LipschitzField::constant(1.0), 0.0, 1.0, 1000),
                        InvalidParameter);
    }
}

TEST_CASE("composition L1 check") {
    const PiecewiseConstantFn f({0.0}, {1.0, 2.0});
    const PiecewiseLinear id({-2.0, 2.0}, {-2.0, 2.0});
    SUBCASE("identical maps give zero") {
        const auto rep = composition_l1_check(f, id, id, -1.0, 1.0);
        CHECK(rep.observed_l1 == 0.0);
    }
    SUBCASE("shift by eps yields exactly eps, matching the bound") {
        const double eps = 0.125;
        const PiecewiseLinear shifted({-2.0, 2.0}, {-2.0 + eps, 2.0 + eps});
        const auto rep = composition_l1_check(f, id, shifted, -1.0, 1.0);
        CHECK(rep.observed_l1 == doctest::Approx(eps).epsilon(1e-12));
        CHECK(rep.observed_l1 <= rep.bound + 1e-12);
        CHECK(rep.bound == doctest::Approx(eps).epsilon(1e-9));
    }
    SUBCASE("oscillating velocity against two characteristic maps") {
        const VelocityFn v(oscillating_sign_velocity(), 1.0);
        const auto lam = LipschitzField::constant(1.0);
        // characteristic maps x0 -> X(x0; t) sampled on a grid, at two times
        auto z = std::make_shared<SurrogateZ>(v);
        const int n = 200;
        std::vector<double> xs(n + 1), y1(n + 1), y2(n + 1);
        for (int i = 0; i <= n; ++i) {
            xs[i] = -1.0 + 2.0 * i / n;
            y1[i] = z->invert(xs[i], 0.5);
            y2[i] = z->invert(xs[i], 0.52);
        }
        const PiecewiseLinear g1(xs, y1), g2(xs, y2);
        const auto rep = composition_l1_check(v.base(), g1, g2, -1.0, 0.0);
        CHECK(rep.observed_l1 <= rep.bound + 1e-9);
        CHECK(rep.observed_l1 > 0.0);
    }
}

TEST_CASE("mollified ODE chain: single jump sits under the weak bound, linear rate") {
    const VelocityFn v(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0);
    const auto lam = LipschitzField::constant(1.0);
    const std::vector<double> ladder{0.1, 0.05, 0.025};
    const auto chain = mollified_ode_chain(v, lam, ladder, 1.0, -1.0, 1.0, 9, 9, 1e-11);
    CHECK(chain.study.monotone_decreasing(1e-12));
    CHECK(chain.weak_ok);
    CHECK(chain.strong_ok);
    CHECK(chain.study.fitted_rate == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("mollified ODE chain: clustered jumps decrease at the sqrt rate") {
    const VelocityFn v(oscillating_sign_velocity(), 1.0);
    const auto lam = LipschitzField::constant(1.0);
    const std::vector<double> ladder{0.1, 0.05, 0.025};
    const auto chain = mollified_ode_chain(v, lam, ladder, 0.5, -1.0, -0.2, 9, 9, 1e-10);
    CHECK(chain.study.errors.size() == 3);
    CHECK(chain.study.monotone_decreasing(1e-12));
    // the L1-form bound is the valid one here; the integrated-difference form
    // underestimates once jumps cluster below the mollification scale
    CHECK(chain.strong_ok);
    CHECK(chain.study.errors.front() > chain.study.errors.back());
}

TEST_CASE("constant-coefficient chain is flat at machine level") {
    const auto v = VelocityFn::constant(2.0);
    const auto lam = LipschitzField::constant(1.0);
    const std::vector<double> ladder{0.1, 0.05};
    const auto chain = mollified_ode_chain(v, lam, ladder, 1.0, -1.0, 1.0, 5, 5, 1e-10);
    for (double e : chain.study.errors) CHECK(e <= 1e-11);
}
