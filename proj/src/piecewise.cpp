#include "discflow/piecewise.hpp"

#include "discflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace discflow {

PiecewiseConstantFn::PiecewiseConstantFn() : values_{0.0} { build_cumulative(); }

PiecewiseConstantFn::PiecewiseConstantFn(std::vector<double> breakpoints,
                                         std::vector<double> values)
    : breaks_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breaks_.size() + 1)
        throw InvalidParameter("piecewise-constant: values.size() must be breakpoints.size()+1");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        if (!(breaks_[i - 1] < breaks_[i]))
            throw InvalidParameter("piecewise-constant: breakpoints must be strictly increasing");
    for (double b : breaks_)
        if (!std::isfinite(b)) throw InvalidParameter("piecewise-constant: non-finite breakpoint");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidParameter("piecewise-constant: non-finite value");
    build_cumulative();
}

PiecewiseConstantFn PiecewiseConstantFn::constant(double c) {
    return PiecewiseConstantFn({}, {c});
}

PiecewiseConstantFn PiecewiseConstantFn::indicator(double a, double b, double c) {
    if (!(a < b)) throw InvalidParameter("indicator: need a < b");
    return PiecewiseConstantFn({a, b}, {0.0, c, 0.0});
}

std::size_t PiecewiseConstantFn::interval_index(double x) const {
    // Right-continuous: index = number of breakpoints <= x.
    return static_cast<std::size_t>(
        std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
}

double PiecewiseConstantFn::operator()(double x) const { return values_[interval_index(x)]; }

double PiecewiseConstantFn::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double PiecewiseConstantFn::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double PiecewiseConstantFn::sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void PiecewiseConstantFn::build_cumulative() {
    const std::size_t n = breaks_.size();
    cum1_.assign(n, 0.0);
    cum2_.assign(n, 0.0);
    cum3_.assign(n, 0.0);
    if (n == 0) return;
    // First pass: antiderivatives anchored at the first breakpoint, then shift
    // so that all are 0 at x = 0.
    for (std::size_t i = 1; i < n; ++i) {
        const double h = breaks_[i] - breaks_[i - 1];
        const double v = values_[i];  // value on (b_{i-1}, b_i)
        cum1_[i] = cum1_[i - 1] + v * h;
        cum2_[i] = cum2_[i - 1] + cum1_[i - 1] * h + 0.5 * v * h * h;
        cum3_[i] = cum3_[i - 1] + cum2_[i - 1] * h + 0.5 * cum1_[i - 1] * h * h +
                   v * h * h * h / 6.0;
    }
    // Shift to anchor the primitives at zero: evaluate the un-anchored primitive
    // at 0 and subtract the induced offsets.
    auto raw_eval = [&](int order, double x) {
        // order 1,2,3; antiderivative anchored at breaks_[0] with value 0.
        std::size_t k = interval_index(x);
        double t;  // distance from the anchor node of the containing cell
        double f1, f2, f3, v;
        if (k == 0) {
            t = x - breaks_[0];  // negative
            f1 = 0.0; f2 = 0.0; f3 = 0.0; v = values_[0];
        } else {
            t = x - breaks_[k - 1];
            f1 = cum1_[k - 1]; f2 = cum2_[k - 1]; f3 = cum3_[k - 1]; v = values_[k];
        }
        switch (order) {
            case 1: return f1 + v * t;
            case 2: return f2 + f1 * t + 0.5 * v * t * t;
            default: return f3 + f2 * t + 0.5 * f1 * t * t + v * t * t * t / 6.0;
        }
    };
    const double a1 = raw_eval(1, 0.0);
    const double a2 = raw_eval(2, 0.0);
    const double a3 = raw_eval(3, 0.0);
    // F(x) = raw1(x) - a1
    // G(x) = raw2(x) - a2 - a1*(x - 0)?  Careful: raw2' = raw1, so
    // G(x) = raw2(x) - raw2(0) - a1*x gives G' = raw1 - a1 = F and G(0)=0.
    // Similarly for the third antiderivative.
    for (std::size_t i = 0; i < n; ++i) {
        const double x = breaks_[i];
        cum3_[i] = raw_eval(3, x) - a3 - a2 * x - 0.5 * a1 * x * x;
        cum2_[i] = raw_eval(2, x) - a2 - a1 * x;
        cum1_[i] = raw_eval(1, x) - a1;
    }
}

double PiecewiseConstantFn::primitive(double x) const {
    const std::size_t k = interval_index(x);
    if (breaks_.empty()) return values_[0] * x;
    if (k == 0) return cum1_[0] + values_[0] * (x - breaks_[0]);
    return cum1_[k - 1] + values_[k] * (x - breaks_[k - 1]);
}

double PiecewiseConstantFn::primitive2(double x) const {
    if (breaks_.empty()) return 0.5 * values_[0] * x * x;
    const std::size_t k = interval_index(x);
    if (k == 0) {
        const double t = x - breaks_[0];
        return cum2_[0] + cum1_[0] * t + 0.5 * values_[0] * t * t;
    }
    const double t = x - breaks_[k - 1];
    return cum2_[k - 1] + cum1_[k - 1] * t + 0.5 * values_[k] * t * t;
}

double PiecewiseConstantFn::primitive3(double x) const {
    if (breaks_.empty()) return values_[0] * x * x * x / 6.0;
    const std::size_t k = interval_index(x);
    double t, f1, f2, f3, v;
    if (k == 0) {
        t = x - breaks_[0];
        f1 = cum1_[0]; f2 = cum2_[0]; f3 = cum3_[0]; v = values_[0];
    } else {
        t = x - breaks_[k - 1];
        f1 = cum1_[k - 1]; f2 = cum2_[k - 1]; f3 = cum3_[k - 1]; v = values_[k];
    }
    return f3 + f2 * t + 0.5 * f1 * t * t + v * t * t * t / 6.0;
}

double PiecewiseConstantFn::integrate(double a, double b) const {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidParameter("integrate: bounds must be finite");
    return primitive(b) - primitive(a);
}

double PiecewiseConstantFn::total_variation(double a, double b) const {
    if (!(a < b)) throw InvalidParameter("total_variation: need a < b");
    double tv = 0.0;
    auto lo = std::upper_bound(breaks_.begin(), breaks_.end(), a);
    auto hi = std::lower_bound(breaks_.begin(), breaks_.end(), b);
    for (auto it = lo; it != hi; ++it) {
        const std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
        tv += std::abs(values_[i + 1] - values_[i]);
    }
    return tv;
}

bool PiecewiseConstantFn::is_nondecreasing() const {
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (values_[i] < values_[i - 1]) return false;
    return true;
}

namespace {
PiecewiseConstantFn combine(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g,
                            double sign) {
    std::vector<double> bp;
    bp.reserve(f.breakpoints().size() + g.breakpoints().size());
    std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
               g.breakpoints().end(), std::back_inserter(bp));
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> vals(bp.size() + 1);
    for (std::size_t i = 0; i <= bp.size(); ++i) {
        double probe;
        if (bp.empty()) probe = 0.0;
        else if (i == 0) probe = bp.front() - 1.0;
        else probe = bp[i - 1];  // right-continuous: value on [b_{i-1}, b_i)
        vals[i] = f(probe) + sign * g(probe);
    }
    return PiecewiseConstantFn(std::move(bp), std::move(vals));
}
}  // namespace

PiecewiseConstantFn PiecewiseConstantFn::operator+(const PiecewiseConstantFn& g) const {
    return combine(*this, g, 1.0);
}

PiecewiseConstantFn PiecewiseConstantFn::operator-(const PiecewiseConstantFn& g) const {
    return combine(*this, g, -1.0);
}

PiecewiseConstantFn PiecewiseConstantFn::scaled(double s) const {
    std::vector<double> vals = values_;
    for (double& v : vals) v *= s;
    return PiecewiseConstantFn(breaks_, std::move(vals));
}

double PiecewiseConstantFn::l1_distance(const PiecewiseConstantFn& g, double a, double b) const {
    if (!(a <= b)) std::swap(a, b);
    const auto grid = refine_breakpoints(breaks_, g.breakpoints(), a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        acc += std::abs((*this)(mid)-g(mid)) * (grid[i + 1] - grid[i]);
    }
    return acc;
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.size() < 2)
        throw InvalidParameter("piecewise-linear: need >= 2 nodes, matching sizes");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i - 1] < xs_[i]))
            throw InvalidParameter("piecewise-linear: nodes must be strictly increasing");
    build_primitive();
}

double PiecewiseLinear::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

bool PiecewiseLinear::strictly_increasing() const {
    for (std::size_t i = 1; i < ys_.size(); ++i)
        if (!(ys_[i - 1] < ys_[i])) return false;
    return true;
}

double PiecewiseLinear::inverse(double y) const {
    const auto it = std::lower_bound(ys_.begin(), ys_.end(), y);
    std::size_t i = static_cast<std::size_t>(it - ys_.begin());
    if (i == 0) i = 1;
    if (i >= ys_.size()) i = ys_.size() - 1;
    const double dy = ys_[i] - ys_[i - 1];
    const double t = (y - ys_[i - 1]) / dy;
    return xs_[i - 1] + t * (xs_[i] - xs_[i - 1]);
}

void PiecewiseLinear::build_primitive() {
    prim_.assign(xs_.size(), 0.0);
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        const double h = xs_[i] - xs_[i - 1];
        prim_[i] = prim_[i - 1] + 0.5 * (ys_[i] + ys_[i - 1]) * h;
    }
    prim_anchor_ = 0.0;
    prim_anchor_ = primitive(0.0);
}

double PiecewiseLinear::primitive(double x) const {
    double raw;
    if (x <= xs_.front()) {
        raw = prim_.front() + ys_.front() * (x - xs_.front());
    } else if (x >= xs_.back()) {
        raw = prim_.back() + ys_.back() * (x - xs_.back());
    } else {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        const double t = x - xs_[i - 1];
        const double slope = (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
        raw = prim_[i - 1] + ys_[i - 1] * t + 0.5 * slope * t * t;
    }
    return raw - prim_anchor_;
}

std::vector<double> refine_breakpoints(std::span<const double> s1, std::span<const double> s2,
                                       double a, double b) {
    std::vector<double> grid;
    grid.push_back(a);
    for (double x : s1)
        if (x > a && x < b) grid.push_back(x);
    for (double x : s2)
        if (x > a && x < b) grid.push_back(x);
    grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

PiecewiseConstantFn oscillating_sign_velocity(double cutoff) {
    if (!(cutoff > 0.0) || cutoff >= 1.0)
        throw InvalidParameter("oscillating_sign_velocity: cutoff must lie in (0,1)");
    const int kmax = static_cast<int>(std::floor(1.0 / cutoff));
    std::vector<double> bp;
    std::vector<double> vals;
    // x < -1: sin(pi/x) < 0  =>  value 1.
    vals.push_back(1.0);
    // Negative side: on (-1/k, -1/(k+1)) the sign of sin(pi/x) is -(-1)^k.
    for (int k = 1; k <= kmax; ++k) {
        bp.push_back(-1.0 / k);
        vals.push_back(2.0 - ((k % 2 == 0) ? 1.0 : -1.0));
    }
    // Truncated middle piece across the accumulation point.
    vals.back() = 2.0;  // (-1/kmax, 1/kmax): neutral truncation value
    // Positive side: the value right of breakpoint 1/k is the one on
    // (1/k, 1/(k-1)), i.e. 2+(-1)^{k-1}; for k=1 that is the tail (1,inf) = 3.
    for (int k = kmax; k >= 1; --k) {
        bp.push_back(1.0 / k);
        vals.push_back(2.0 + (((k - 1) % 2 == 0) ? 1.0 : -1.0));
    }
    return PiecewiseConstantFn(std::move(bp), std::move(vals));
}

} // namespace discflow
