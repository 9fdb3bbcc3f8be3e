#include "discflow/surrogate.hpp"

#include <algorithm>

namespace discflow {

SurrogateZ::SurrogateZ(const VelocityFn& v)
    : breaks_(v.base().breakpoints()), vlo_(v.lower()), vhi_(v.upper()) {
    const auto& vals = v.base().values();
    slopes_.resize(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) slopes_[i] = 1.0 / vals[i];
    pvals_.assign(breaks_.size(), 0.0);
    if (!breaks_.empty()) {
        // accumulate, then anchor P(0) = 0
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            pvals_[i] = pvals_[i - 1] + slopes_[i] * (breaks_[i] - breaks_[i - 1]);
        double p0;
        {
            const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), 0.0);
            const std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
            p0 = (k == 0) ? pvals_[0] + slopes_[0] * (0.0 - breaks_[0])
                          : pvals_[k - 1] + slopes_[k] * (0.0 - breaks_[k - 1]);
        }
        for (double& p : pvals_) p -= p0;
    }
}

double SurrogateZ::prim(double x) const {
    if (breaks_.empty()) return slopes_[0] * x;
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
    if (k == 0) return pvals_[0] + slopes_[0] * (x - breaks_[0]);
    return pvals_[k - 1] + slopes_[k] * (x - breaks_[k - 1]);
}

double SurrogateZ::prim_inverse(double p) const {
    if (breaks_.empty()) return p / slopes_[0];
    const auto it = std::lower_bound(pvals_.begin(), pvals_.end(), p);
    const std::size_t k = static_cast<std::size_t>(it - pvals_.begin());
    if (k == 0) return breaks_[0] + (p - pvals_[0]) / slopes_[0];
    return breaks_[k - 1] + (p - pvals_[k - 1]) / slopes_[k];
}

double z_eval(const VelocityFn& v, double x0, double x) { return SurrogateZ(v).eval(x0, x); }

double z_invert(const VelocityFn& v, double x0, double u) { return SurrogateZ(v).invert(x0, u); }

} // namespace discflow
