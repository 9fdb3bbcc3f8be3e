#pragma once

#include "discflow/mollify.hpp"
#include "discflow/ode.hpp"

#include <functional>

namespace discflow::ode {

/// Evaluated right-hand sides of the two stability estimates for
/// |X[v,lam](x0;t) - X[v~,lam~](x~0;t)|:
///  - `strong` uses the L1 distance ||v - v~|| over the reachable window;
///  - `weak` replaces it by the integrated difference |int_Y (v - v~)|,
///    which is what shrinks linearly under mollification.
struct StabilityBounds {
    double strong;
    double weak;
    double lambda_term;   // shared first term
    double l1_term;       // ||v - v~||_{L1(Y)}
    double primitive_term;  // |int_Y (v - v~)|
};

/// `lam_diff_sup(s)` must return ||lam(s,.) - lam~(s,.)||_{L_inf(X-window)}
/// where the X-window is x0 + T*sup(v)*sup(lam)*(-1,1); exact catalogue
/// evaluations keep the bound free of quadrature slack.
StabilityBounds stability_bound(const VelocityFn& v, const VelocityFn& v_tilde,
                                const LipschitzField& lam, const LipschitzField& lam_tilde,
                                double x0, double x0_tilde, double t, double T,
                                const std::function<double(double)>& lam_diff_sup);

/// Mollified comparison v~ = v_eps; the primitive term is evaluated in closed
/// form from the exact primitives.
StabilityBounds stability_bound(const VelocityFn& v, const SmoothVelocity& v_eps,
                                const LipschitzField& lam, const LipschitzField& lam_tilde,
                                double x0, double x0_tilde, double t, double T,
                                const std::function<double(double)>& lam_diff_sup);

} // namespace discflow::ode
