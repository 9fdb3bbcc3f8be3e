#include <doctest.h>

#include "discflow/filippov.hpp"
#include "discflow/piecewise.hpp"

using namespace discflow;
using namespace discflow::ode;

TEST_CASE("continuous point gives a degenerate enclosure") {
    const auto v = VelocityFn::constant(1.0);
    const auto enc = filippov_enclosure(v, LipschitzField::constant(1.0), 0.0, 0.3, 0.1);
    CHECK(enc.lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(enc.hi == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("jump point spans the one-sided hull") {
    const VelocityFn v(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0);
    const auto enc = filippov_enclosure(v, LipschitzField::constant(1.0), 0.0, 0.0, 0.2);
    CHECK(enc.lo == doctest::Approx(1.0));
    CHECK(enc.hi == doctest::Approx(2.0));
    CHECK(enc.contains(1.5));
    CHECK(!enc.contains(2.5));
}

TEST_CASE("osgood certificate") {
    const VelocityFn v(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0);
    SUBCASE("identity-slope field") {
        // lambda(x) = x: Lipschitz slope 1
        const auto lam = LipschitzField::affine_x(0.0, 1.0, 10.0);
        const auto cert = osgood_certificate(v, lam);
        CHECK(cert.bad_set_measure == 0.0);
        CHECK(cert.osgood_slope == doctest::Approx(2.0));
        CHECK(cert.unique);
    }
    SUBCASE("zero field") {
        const auto cert = osgood_certificate(v, LipschitzField::constant(0.0));
        CHECK(cert.osgood_slope == 0.0);
        CHECK(cert.unique);
    }
    SUBCASE("non-autonomous field is rejected") {
        const auto lam = LipschitzField::cosine_t(1.0);
        CHECK_THROWS_AS(osgood_certificate(v, lam), PreconditionViolation);
    }
}

TEST_CASE("trajectory difference quotients live in the enclosure") {
    const VelocityFn v(oscillating_sign_velocity(), 1.0);
    const auto lam = LipschitzField::constant(1.0);
    SolveOptions opt;
    opt.compute_residual = false;
    for (double x0 : {-1.0, -0.5}) {
        const auto X = solve_trajectory(v, lam, x0, 1.0, opt);
        CHECK(filippov_containment(X, v, lam, 400, 1e-4) >= 0.99);
    }
}
