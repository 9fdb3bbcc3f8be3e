#include "discflow/mollify.hpp"

#include "discflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace discflow {

MollifiedFn::MollifiedFn(PiecewiseConstantFn base, double eps)
    : base_(std::move(base)), eps_(eps), prim_anchor_(0.0) {
    if (!(eps > 0.0)) throw InvalidParameter("mollify: eps must be positive");
    const double e2 = eps_ * eps_;
    prim_anchor_ = (base_.primitive3(eps_) - 2.0 * base_.primitive3(0.0) +
                    base_.primitive3(-eps_)) / e2;
}

double MollifiedFn::operator()(double x) const {
    const double e2 = eps_ * eps_;
    return (base_.primitive2(x + eps_) - 2.0 * base_.primitive2(x) +
            base_.primitive2(x - eps_)) / e2;
}

double MollifiedFn::derivative(double x) const {
    const double e2 = eps_ * eps_;
    return (base_.primitive(x + eps_) - 2.0 * base_.primitive(x) +
            base_.primitive(x - eps_)) / e2;
}

double MollifiedFn::primitive(double x) const {
    const double e2 = eps_ * eps_;
    return (base_.primitive3(x + eps_) - 2.0 * base_.primitive3(x) +
            base_.primitive3(x - eps_)) / e2 - prim_anchor_;
}

double MollifiedFn::lipschitz_bound() const {
    return (base_.max_value() - base_.min_value()) / eps_;
}

MollifiedFn mollify(const PiecewiseConstantFn& f, double eps) { return MollifiedFn(f, eps); }

namespace {
double gap_over_grid(const PiecewiseConstantFn& f, const std::function<double(double)>& gp,
                     const std::vector<double>& grid) {
    // The difference of primitives is smooth per refined cell; sample endpoints
    // and a few interior points per cell.
    double sup = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        for (int k = 0; k <= 4; ++k) {
            const double y = grid[i] + (grid[i + 1] - grid[i]) * (k / 4.0);
            sup = std::max(sup, std::abs(f.primitive(y) - gp(y)));
        }
    }
    return sup;
}
}  // namespace

double primitive_gap(const PiecewiseConstantFn& f, const MollifiedFn& g, double R) {
    std::vector<double> gb;
    gb.reserve(3 * g.base().breakpoints().size());
    for (double b : g.base().breakpoints()) {
        gb.push_back(b - g.eps());
        gb.push_back(b);
        gb.push_back(b + g.eps());
    }
    std::sort(gb.begin(), gb.end());
    const auto grid = refine_breakpoints(f.breakpoints(), gb, -R, R);
    return gap_over_grid(f, [&](double y) { return g.primitive(y); }, grid);
}

double primitive_gap(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, double R) {
    const auto grid = refine_breakpoints(f.breakpoints(), g.breakpoints(), -R, R);
    // Both primitives are piecewise linear, so the sup over each cell is
    // attained at an endpoint.
    double sup = 0.0;
    for (double y : grid) sup = std::max(sup, std::abs(f.primitive(y) - g.primitive(y)));
    return sup;
}

double primitive_gap(const PiecewiseConstantFn& f,
                     const std::function<double(double)>& g_primitive, double R,
                     std::span<const double> g_breakpoints) {
    const auto grid = refine_breakpoints(f.breakpoints(), g_breakpoints, -R, R);
    return gap_over_grid(f, g_primitive, grid);
}

} // namespace discflow
