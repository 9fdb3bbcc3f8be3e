#pragma once

#include "discflow/ode.hpp"

namespace discflow::ode {

/// Interval enclosure of the Filippov convexification of f = v*lambda(t,.)
/// at a point: the essential one-sided hull over shrinking balls, excluding
/// null sets (piece endpoints carry no essential mass).
struct FilippovEnclosure {
    double lo, hi;
    double delta_final;  // radius of the last ladder rung
    bool contains(double s, double margin = 0.0) const {
        return s >= lo - margin && s <= hi + margin;
    }
};

FilippovEnclosure filippov_enclosure(const VelocityFn& v, const LipschitzField& lam, double t,
                                     double x, double delta, int ladder_rungs = 6);

struct OsgoodCertificate {
    double bad_set_measure;  // Lebesgue measure of {lambda~ != 0 and v discontinuous}
    double osgood_slope;     // K = sup(v) * ||lambda~'||_inf
    bool unique;
};

/// Uniqueness certificate for the autonomous case; the field must be declared
/// time-independent (no time breakpoints, zero time modulus).
OsgoodCertificate osgood_certificate(const VelocityFn& v, const LipschitzField& lam_autonomous);

/// Fraction of sample times at which the one-sided difference quotient
/// (X(t+dt)-X(t))/dt lies inside the Filippov enclosure at (t, X(t)). The
/// enclosure ball is matched to the distance the state can move over dt and
/// widened by the field's declared time modulus.
double filippov_containment(const Trajectory& X, const VelocityFn& v, const LipschitzField& lam,
                            int n_samples, double dt);

} // namespace discflow::ode
