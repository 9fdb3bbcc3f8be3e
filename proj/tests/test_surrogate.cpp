#include <doctest.h>

#include "discflow/surrogate.hpp"

#include <random>

using namespace discflow;

TEST_CASE("z_eval on catalogue cases") {
    CHECK(z_eval(VelocityFn::constant(1.0), 0.0, 2.0) == doctest::Approx(2.0));
    const VelocityFn v(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0);
    // int_{-1}^{1} 1/v = 1 + 0.5
    CHECK(z_eval(v, -1.0, 1.0) == doctest::Approx(1.5));
    CHECK(z_eval(v, 0.3, 0.3) == 0.0);
}

TEST_CASE("z_invert on catalogue cases") {
    CHECK(z_invert(VelocityFn::constant(1.0), 0.5, 3.0) == doctest::Approx(3.5));
    const VelocityFn v(PiecewiseConstantFn({0.0}, {1.0, 2.0}), 1.0);
    CHECK(z_invert(v, -1.0, 1.5) == doctest::Approx(1.0));
    CHECK(z_invert(v, -1.0, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("slopes bounded by the velocity range and strict monotonicity") {
    const VelocityFn v(PiecewiseConstantFn({-0.5, 0.25, 1.0}, {1.0, 3.0, 2.0, 1.5}), 1.0);
    const SurrogateZ z(v);
    const double h = 1e-6;
    for (double x : {-1.0, -0.4, 0.0, 0.5, 1.2}) {
        const double slope = (z.eval(0.0, x + h) - z.eval(0.0, x)) / h;
        CHECK(slope >= 1.0 / v.upper() - 1e-9);
        CHECK(slope <= 1.0 / v.lower() + 1e-9);
    }
}

TEST_CASE("round trip invert(eval) = id on random instances") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(-10.0, 10.0);
    std::uniform_real_distribution<double> uval(0.5, 4.0);
    for (int inst = 0; inst < 50; ++inst) {
        const int n_jumps = 1 + static_cast<int>(rng() % 6);
        std::vector<double> bp;
        for (int i = 0; i < n_jumps; ++i) bp.push_back(ux(rng));
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
        std::vector<double> vals;
        for (std::size_t i = 0; i <= bp.size(); ++i) vals.push_back(uval(rng));
        const VelocityFn v(PiecewiseConstantFn(bp, vals), 0.5);
        const SurrogateZ z(v);
        for (int k = 0; k < 20; ++k) {
            const double x0 = ux(rng), x = ux(rng);
            const double back = z.invert(x0, z.eval(x0, x));
            CHECK(std::abs(back - x) <= 1e-12 * std::max(1.0, std::abs(x)));
        }
    }
}
