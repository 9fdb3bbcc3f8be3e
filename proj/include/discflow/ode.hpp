#pragma once

#include "discflow/fields.hpp"
#include "discflow/rk45.hpp"
#include "discflow/surrogate.hpp"

#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace discflow::ode {

/// Dense-output solution of the transformed integral equation
/// c(t) = int_0^t lambda(s, Z^{-1}(x0; c(s))) ds on [0, T], assembled from the
/// accepted integrator steps.
class CaratheodoryCurve {
public:
    CaratheodoryCurve() = default;
    CaratheodoryCurve(std::vector<Dopri5Step> steps, double T, double end_value);

    double operator()(double t) const;
    double T() const { return T_; }
    double end_value() const { return end_; }
    const std::vector<Dopri5Step>& steps() const { return steps_; }

private:
    std::vector<Dopri5Step> steps_;
    double T_ = 0.0;
    double end_ = 0.0;
};

struct SolveOptions {
    double tol = 1e-9;
    int verify_grid = 512;
    bool compute_residual = true;
};

/// Solution X[v, lambda](x0; .) of the discontinuous IVP, realized as
/// X = Z^{-1} o C. For smooth velocities the state equation is integrated
/// directly and the transform is the identity.
class Trajectory {
public:
    double operator()(double t) const;

    double x0() const { return x0_; }
    double T() const { return T_; }
    /// Max defect of the weak (integral) solution identity over the
    /// verification grid; NaN if not computed.
    double residual() const { return residual_; }
    /// |X(t)-X(s)| <= lip_t * |t-s|.
    double lip_t() const { return lip_t_; }
    const CaratheodoryCurve& curve() const { return curve_; }
    bool surrogate() const { return static_cast<bool>(z_); }
    const SurrogateZ& z() const { return *z_; }

    friend Trajectory solve_trajectory(std::shared_ptr<const SurrogateZ>, const LipschitzField&,
                                       double, double, const SolveOptions&);
    friend Trajectory solve_trajectory(const SmoothVelocity&, const LipschitzField&, double,
                                       double, const SolveOptions&);

private:
    std::shared_ptr<const SurrogateZ> z_;  // null for direct (smooth) solves
    double x0_ = 0.0;
    double u0_ = 0.0;  // P(x0) when surrogate
    CaratheodoryCurve curve_;
    double T_ = 0.0;
    double residual_ = std::numeric_limits<double>::quiet_NaN();
    double lip_t_ = 0.0;
};

CaratheodoryCurve solve_caratheodory(const SurrogateZ& z, const LipschitzField& lam, double x0,
                                     double T, double tol);
CaratheodoryCurve solve_caratheodory(const VelocityFn& v, const LipschitzField& lam, double x0,
                                     double T, double tol);

Trajectory solve_trajectory(const VelocityFn& v, const LipschitzField& lam, double x0, double T,
                            const SolveOptions& opt = {});
/// Shares a prebuilt surrogate transform across many initial points.
Trajectory solve_trajectory(std::shared_ptr<const SurrogateZ> z, const LipschitzField& lam,
                            double x0, double T, const SolveOptions& opt = {});
/// Smooth velocity: direct integration of x' = v(x) lambda(t, x).
Trajectory solve_trajectory(const SmoothVelocity& v, const LipschitzField& lam, double x0,
                            double T, const SolveOptions& opt = {});

/// Characteristic through (t_anchor, x_anchor): values at the ascending
/// `times`, which may lie on either side of the anchor.
void characteristic_at(const SurrogateZ& z, const LipschitzField& lam, double t_anchor,
                       double x_anchor, std::span<const double> times, std::span<double> out,
                       double tol);
void characteristic_at(const SmoothVelocity& v, const LipschitzField& lam, double t_anchor,
                       double x_anchor, std::span<const double> times, std::span<double> out,
                       double tol);

} // namespace discflow::ode
