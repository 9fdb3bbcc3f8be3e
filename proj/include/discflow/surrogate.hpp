#pragma once

#include "discflow/fields.hpp"

#include <memory>
#include <vector>

namespace discflow {

/// The surrogate transform Z[v](x0; x) = int_{x0}^x 1/v(s) ds for a
/// piecewise-constant velocity: a strictly increasing piecewise-linear map
/// with slopes in [1/sup v, 1/lower v], evaluated and inverted exactly.
///
/// Internally caches the primitive P(x) = int_0^x 1/v once per velocity, so
/// that Z(x0; x) = P(x) - P(x0) is shared by every initial point.
class SurrogateZ {
public:
    explicit SurrogateZ(const VelocityFn& v);

    /// Z[v](x0; x), exact.
    double eval(double x0, double x) const { return prim(x) - prim(x0); }
    /// The x with Z[v](x0; x) = u, exact piecewise-linear inversion.
    double invert(double x0, double u) const { return prim_inverse(u + prim(x0)); }

    double prim(double x) const;
    double prim_inverse(double p) const;

    double v_lower() const { return vlo_; }
    double v_upper() const { return vhi_; }

private:
    std::vector<double> breaks_;
    std::vector<double> pvals_;   // P at the breakpoints
    std::vector<double> slopes_;  // 1/v per interval, slopes_.size() == breaks_.size()+1
    double vlo_, vhi_;
};

double z_eval(const VelocityFn& v, double x0, double x);
double z_invert(const VelocityFn& v, double x0, double u);

} // namespace discflow
