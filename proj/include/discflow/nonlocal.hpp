#pragma once

#include "discflow/fields.hpp"
#include "discflow/ode.hpp"
#include "discflow/piecewise.hpp"
#include "discflow/surrogate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace discflow::nonlocal {

/// Lipschitz velocity law V applied to the nonlocal term. The catalogue is
/// restricted to constant and affine laws; these cover the model runs and are
/// closed under mollification with a symmetric kernel.
struct VelocityLaw {
    enum class Kind { Constant, Affine };
    Kind kind = Kind::Constant;
    double a = 1.0;  // constant value, or affine offset
    double b = 0.0;  // affine slope: V(u) = a + b u

    double operator()(double u) const { return kind == Kind::Constant ? a : a + b * u; }
    double deriv() const { return kind == Kind::Constant ? 0.0 : b; }
    double sup_abs_on(double lo, double hi) const;

    static VelocityLaw constant(double c) { return {Kind::Constant, c, 0.0}; }
    static VelocityLaw affine(double a, double b) { return {Kind::Affine, a, b}; }
};

struct GridSpec {
    int ny = 2000;  // Lagrangian cells over supp(q0)
    int nt = 400;   // output times over [0, T]
};

/// Full problem description for one nonlocal run.
struct Scenario {
    PiecewiseConstantFn q0;  // compactly supported initial datum
    Kernel gamma;
    VelocityLaw V;
    VelocityFn v = VelocityFn::constant(1.0);
    std::optional<SmoothVelocity> v_smooth;  // overrides v in the characteristics when set
    double T = 1.0;
    double x_min = -1.0, x_max = 1.0;
    GridSpec grid;

    /// A-priori sup bound on the density used to size the relevant range of V
    /// (max-principle bound when one applies, else a transparent fallback).
    double default_q_sup() const;
    /// sup |V| over [0, ||gamma||_1 * q_sup]: the effective lambda bound.
    double lambda_sup_bound(double q_sup) const;

    void validate() const;

    double q0_sup() const { return q0.sup_abs(); }
    double q0_l1() const;
    std::pair<double, double> q0_support() const;
};

/// Paper constants for the fixed-point set Omega_M^{M'}: M, M' and the rate
/// K = sup(v) * |V'| * M'.
struct HorizonConstants {
    double M, Mprime, K;
};

HorizonConstants horizon_constants(const Scenario& s, double q_sup);

/// Largest window length satisfying both the self-map condition
/// exp(T K) <= 42 and the contraction condition (T K) e^{T K} <= 1/2.
/// Returns +infinity when V' = 0.
double horizon_estimate(const Scenario& s);

/// Converged nonlocal term w on the output grid (uniform x, output times),
/// bilinear interpolation in between.
struct NonlocalTerm {
    std::vector<double> times;
    std::vector<double> xs;
    std::vector<std::vector<double>> values;  // [k][i]
    double M = 0.0, Mprime = 0.0;

    double eval(double t, double x) const;
    double sup() const;
    /// Max discrete slope |dw/dx| over the grid.
    double max_slope() const;
    LipschitzField as_field(const VelocityLaw& V, double lam_sup, double lam_lip) const;
};

/// Lagrangian trajectories xi(0, y_j; t_k) of all cell edges, with the
/// per-slice monotonicity certificate.
struct CharacteristicsField {
    std::vector<double> times;
    std::vector<double> y0;                 // cell edges at t = 0
    std::vector<std::vector<double>> xi;    // [k][j]
    bool monotone() const;
};

struct WindowReport {
    double t0, t1;
    std::vector<double> diffs;  // Picard sup-differences
    double q_sup_used;          // norm entering the window constants
};

struct AuditRow {
    double t;
    double mass_lagrangian, mass_eulerian;
    double sup;
    double tv;
};

struct NonlocalSolution {
    Scenario scenario;
    NonlocalTerm w;
    CharacteristicsField chars;
    std::vector<double> cell_mass;  // per Lagrangian cell, constant in time
    std::vector<WindowReport> windows;
    std::vector<AuditRow> audit;

    /// Pushforward density at output index k as an exact piecewise-constant
    /// function.
    PiecewiseConstantFn density(std::size_t k) const;
    static PiecewiseConstantFn density_from(const std::vector<double>& pos,
                                            const std::vector<double>& mass);
    std::size_t time_index(double t) const;

    double mass_lagrangian() const;
    double mass_eulerian(std::size_t k) const;

    /// One-sided density limits (left, right) at x_star, read from the cells
    /// adjacent to the one straddling x_star.
    std::pair<double, double> one_sided_density(std::size_t k, double x_star) const;

    /// Eulerian samples (x, q) at output index k on a uniform grid with the
    /// jump points of v inserted (two samples per jump keep both limits).
    std::vector<std::pair<double, double>> eulerian_samples(std::size_t k, int n) const;

    /// Characteristic through (t_anchor, x_anchor) under the converged w
    /// field, evaluated at ascending times (flow-inversion checks).
    void characteristic(double t_anchor, double x_anchor, std::span<const double> times,
                        std::span<double> out, double tol = 1e-9) const;
};

/// One application of the fixed-point map F on a term sampled over its own
/// times: integrates the characteristics of all cell edges under V(w) from
/// t = 0 and rebuilds the forward-looking convolution exactly.
NonlocalTerm apply_F(const NonlocalTerm& w, const Scenario& s, double tol = 1e-9);

NonlocalSolution fixed_point_solve(const Scenario& s, double tol = 1e-8, int max_iter = 50);

enum class MaxPrincipleCase {
    MonotoneIncreasingV,   // sup_t ||q|| <= ||q0||_inf
    StrictlyDecreasingVlaw,  // the max{...} bound for esssup V' < 0
    Exponential,           // growth bound exp(t * sup(v) |V'| gamma(0) ||q0||_1)
};

struct MaxPrincipleReport {
    MaxPrincipleCase which;
    double bound;       // smallest bound over the horizon (case 3: at final time)
    double observed;    // sup over t of ||q(t)||_inf
    double margin;      // bound - observed (>= 0 means pass)
    bool pass;
};

MaxPrincipleReport max_principle_audit(const NonlocalSolution& sol, MaxPrincipleCase which);

/// max over shared output times of |int (q_a - q_b)(t,.) g| computed in
/// Lagrangian form: int q0(y) g(xi(0,y;t)) dy, exact per cell.
double weak_error(const NonlocalSolution& a, const NonlocalSolution& b,
                  const PiecewiseLinear& g);

/// Hat test function on [lo, hi] with unit peak.
PiecewiseLinear hat_function(double lo, double hi);

} // namespace discflow::nonlocal
