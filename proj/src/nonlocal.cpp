#include "discflow/nonlocal.hpp"

#include "discflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>

namespace discflow::nonlocal {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double solve_contraction_time(double K) {
    // (K T) e^{K T} = 1/2  =>  K T = W0(1/2), by Newton on x e^x - 1/2.
    double x = 0.35;
    for (int i = 0; i < 8; ++i) {
        const double ex = std::exp(x);
        x -= (x * ex - 0.5) / ((1.0 + x) * ex);
    }
    const double self_map = std::log(42.0);
    return std::min(x, self_map) / K;
}
}  // namespace

double VelocityLaw::sup_abs_on(double lo, double hi) const {
    return std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
}

double Scenario::q0_l1() const {
    const auto [lo, hi] = q0_support();
    double acc = 0.0;
    const auto& bp = q0.breakpoints();
    std::vector<double> grid;
    grid.push_back(lo);
    for (double b : bp)
        if (b > lo && b < hi) grid.push_back(b);
    grid.push_back(hi);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        acc += std::abs(q0(0.5 * (grid[i] + grid[i + 1]))) * (grid[i + 1] - grid[i]);
    return acc;
}

std::pair<double, double> Scenario::q0_support() const {
    const auto& bp = q0.breakpoints();
    if (bp.size() < 2 || q0.values().front() != 0.0 || q0.values().back() != 0.0)
        throw InvalidParameter("scenario: q0 must be compactly supported");
    return {bp.front(), bp.back()};
}

namespace {
bool traffic_assumptions(const Scenario& s) {
    return s.V.deriv() <= 0.0 && s.gamma.monotone_decreasing() &&
           s.gamma.shape().breakpoints().front() >= 0.0 && s.q0.min_value() >= 0.0;
}

double sup_v_times_q0(const Scenario& s) {
    const auto grid = refine_breakpoints(s.v.base().breakpoints(), s.q0.breakpoints(),
                                         s.q0_support().first - 1.0, s.q0_support().second + 1.0);
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        m = std::max(m, std::abs(s.v(mid) * s.q0(mid)));
    }
    return m;
}
}  // namespace

double Scenario::default_q_sup() const {
    const double vup = v.upper(), vlo = v.lower();
    if (V.kind == VelocityLaw::Kind::Constant) return q0_sup() * vup / vlo;
    if (traffic_assumptions(*this) && v.base().is_nondecreasing()) return q0_sup();
    if (traffic_assumptions(*this) && V.deriv() < 0.0) {
        const double t1 = sup_v_times_q0(*this) / vlo;
        const double t2 = (vup / vlo) * q0_l1();  // |V'| ratio = 1 for affine laws
        return std::max(t1, t2);
    }
    // Exponential fallback over the requested horizon.
    return sup_v_times_q0(*this) / vlo *
           std::exp(T * vup * std::abs(V.deriv()) * gamma.value_at_zero() * q0_l1());
}

double Scenario::lambda_sup_bound(double q_sup) const {
    return V.sup_abs_on(0.0, gamma.l1_norm() * std::max(q_sup, 0.0));
}

void Scenario::validate() const {
    if (!(T > 0.0)) throw InvalidParameter("scenario: T must be positive");
    if (!(x_min < x_max)) throw InvalidParameter("scenario: empty window");
    if (grid.ny < 8 || grid.nt < 1) throw InvalidParameter("scenario: grid too small");
    const auto [lo, hi] = q0_support();
    if (!(lo > x_min && hi < x_max))
        throw InvalidParameter("scenario: supp(q0) must lie inside the window");
    const double q_sup = default_q_sup();
    const double u_max = gamma.l1_norm() * q_sup;
    const double v_hi = (V.kind == VelocityLaw::Kind::Constant)
                            ? V.a
                            : std::max(V(0.0), V(u_max));
    const double v_lo_law = (V.kind == VelocityLaw::Kind::Constant)
                                ? V.a
                                : std::min(V(0.0), V(u_max));
    const double right_need = T * v.upper() * std::max(0.0, v_hi);
    const double left_need = T * v.upper() * std::max(0.0, -v_lo_law);
    if (x_max - hi < right_need || lo - x_min < left_need)
        throw InvalidParameter("scenario: window margin too small for the declared horizon");
}

HorizonConstants horizon_constants(const Scenario& s, double q_sup) {
    HorizonConstants h;
    const double ratio = s.v.upper() / s.v.lower();
    h.M = 42.0 * s.gamma.l1_norm() * q_sup * ratio;
    h.Mprime = 42.0 * s.gamma.tv_seminorm() * q_sup * ratio;
    h.K = s.v.upper() * std::abs(s.V.deriv()) * h.Mprime;
    return h;
}

double horizon_estimate(const Scenario& s) {
    const auto h = horizon_constants(s, s.q0_sup());
    if (h.K == 0.0) return kInf;
    return solve_contraction_time(h.K);
}

// ---------------------------------------------------------------------------
// Nonlocal term grid

double NonlocalTerm::eval(double t, double x) const {
    // bilinear; clamped at the grid edges
    const auto& ts = times;
    std::size_t k = 0;
    if (t <= ts.front()) k = 0;
    else if (t >= ts.back()) k = ts.size() - 2;
    else k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
    const double th = std::clamp((t - ts[k]) / (ts[k + 1] - ts[k]), 0.0, 1.0);

    const double dx = (xs.back() - xs.front()) / (xs.size() - 1);
    double u = (x - xs.front()) / dx;
    u = std::clamp(u, 0.0, static_cast<double>(xs.size() - 1) - 1e-12);
    const std::size_t i = static_cast<std::size_t>(u);
    const double fx = u - i;
    const double w0 = values[k][i] + fx * (values[k][i + 1] - values[k][i]);
    const double w1 = values[k + 1][i] + fx * (values[k + 1][i + 1] - values[k + 1][i]);
    return w0 + th * (w1 - w0);
}

double NonlocalTerm::sup() const {
    double m = 0.0;
    for (const auto& row : values)
        for (double v : row) m = std::max(m, std::abs(v));
    return m;
}

double NonlocalTerm::max_slope() const {
    const double dx = (xs.back() - xs.front()) / (xs.size() - 1);
    double m = 0.0;
    for (const auto& row : values)
        for (std::size_t i = 0; i + 1 < row.size(); ++i)
            m = std::max(m, std::abs(row[i + 1] - row[i]) / dx);
    return m;
}

LipschitzField NonlocalTerm::as_field(const VelocityLaw& V, double lam_sup,
                                      double lam_lip) const {
    auto self = *this;  // value copy keeps the field self-contained
    return LipschitzField(
        [self, V](double t, double x) { return V(self.eval(t, x)); }, lam_sup, lam_lip,
        times, /*time_modulus=*/0.0);
}

bool CharacteristicsField::monotone() const {
    for (const auto& row : xi)
        for (std::size_t j = 1; j < row.size(); ++j)
            if (!(row[j] > row[j - 1])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Pushforward and exact forward-looking convolution

namespace {

// CDF of the pushforward measure: positions xi (cell edges), prefix masses.
double pushforward_cdf(const std::vector<double>& xi, const std::vector<double>& prefix,
                       double x) {
    if (x <= xi.front()) return 0.0;
    if (x >= xi.back()) return prefix.back();
    const auto it = std::upper_bound(xi.begin(), xi.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xi.begin()) - 1;
    const double frac = (x - xi[j]) / (xi[j + 1] - xi[j]);
    return prefix[j] + (prefix[j + 1] - prefix[j]) * frac;
}

// w(x) = int gamma(y - x) qhat(y) dy, exact for the piecewise-constant kernel
// against the piecewise-constant pushforward density.
void convolve_row(const std::vector<double>& xi, const std::vector<double>& prefix,
                  const Kernel& gamma, const std::vector<double>& xs, std::vector<double>& out) {
    const auto& gb = gamma.shape().breakpoints();
    const auto& gv = gamma.shape().values();
    if (gb.empty()) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double active_lo = xi.front() - gb.back();
    const double active_hi = xi.back() - gb.front();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x < active_lo || x > active_hi) {
            out[i] = 0.0;
            continue;
        }
        double acc = 0.0;
        for (std::size_t p = 1; p < gb.size(); ++p) {
            if (gv[p] == 0.0) continue;
            acc += gv[p] * (pushforward_cdf(xi, prefix, x + gb[p]) -
                            pushforward_cdf(xi, prefix, x + gb[p - 1]));
        }
        out[i] = acc;
    }
}

std::vector<double> prefix_masses(const std::vector<double>& mass) {
    std::vector<double> p(mass.size() + 1, 0.0);
    for (std::size_t j = 0; j < mass.size(); ++j) p[j + 1] = p[j] + mass[j];
    return p;
}

// Lagrangian cell edges over supp(q0): uniform nodes plus interior q0
// breakpoints (so q0 is constant per cell).
std::vector<double> build_edges(const Scenario& s) {
    const auto [lo, hi] = s.q0_support();
    std::vector<double> edges;
    edges.reserve(s.grid.ny + 1 + s.q0.breakpoints().size());
    for (int j = 0; j <= s.grid.ny; ++j)
        edges.push_back(lo + (hi - lo) * j / s.grid.ny);
    const double snap = (hi - lo) * 1e-12;
    for (double b : s.q0.breakpoints())
        if (b > lo + snap && b < hi - snap) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    // drop near-duplicates
    std::vector<double> out;
    out.reserve(edges.size());
    for (double e : edges)
        if (out.empty() || e - out.back() > snap) out.push_back(e);
    return out;
}

// CDF of the pushforward whose node positions are interpolated between two
// slices: p_j(th) = (1-th) xa_j + th xb_j. Interpolating the positions (the
// Lagrangian frame) rather than w-values at fixed x keeps the moving support
// edges sharp; value-lerping across a moving edge would rectify into a
// spurious drift of the edge characteristics.
double pushforward_cdf_lerp(const std::vector<double>& xa, const std::vector<double>& xb,
                            double th, const std::vector<double>& prefix, double x) {
    auto pose = [&](std::size_t j) { return xa[j] + th * (xb[j] - xa[j]); };
    const std::size_t n = xa.size();
    if (x <= pose(0)) return 0.0;
    if (x >= pose(n - 1)) return prefix.back();
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (pose(mid) <= x) lo = mid;
        else hi = mid;
    }
    const double pl = pose(lo), pr = pose(hi);
    return prefix[lo] + (prefix[lo + 1] - prefix[lo]) * (x - pl) / (pr - pl);
}

struct SegmentField {
    // V(w) on one time slab [t0, t1]: exact in x from the pushforward at
    // time-interpolated node positions.
    const std::vector<double>* xi_a;
    const std::vector<double>* xi_b;
    const std::vector<double>* prefix;
    const Kernel* gamma;
    double t0, t1;
    VelocityLaw V;

    double operator()(double t, double x) const {
        const double th = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
        const auto& gb = gamma->shape().breakpoints();
        const auto& gv = gamma->shape().values();
        double acc = 0.0;
        for (std::size_t p = 1; p < gb.size(); ++p) {
            if (gv[p] == 0.0) continue;
            acc += gv[p] * (pushforward_cdf_lerp(*xi_a, *xi_b, th, *prefix, x + gb[p]) -
                            pushforward_cdf_lerp(*xi_a, *xi_b, th, *prefix, x + gb[p - 1]));
        }
        return V(acc);
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Fixed-point solve

NonlocalSolution fixed_point_solve(const Scenario& s, double tol, int max_iter) {
    s.validate();
    if (!(tol > 0.0)) throw InvalidParameter("fixed_point_solve: tol must be positive");

    NonlocalSolution sol;
    sol.scenario = s;

    const auto edges = build_edges(s);
    const std::size_t n_edges = edges.size();
    std::vector<double> mass(n_edges - 1);
    for (std::size_t j = 0; j + 1 < n_edges; ++j)
        mass[j] = s.q0(0.5 * (edges[j] + edges[j + 1])) * (edges[j + 1] - edges[j]);
    sol.cell_mass = mass;


    const int nt = s.grid.nt;
    std::vector<double> out_times(nt + 1);
    for (int k = 0; k <= nt; ++k) out_times[k] = s.T * k / nt;

    const std::size_t nx = static_cast<std::size_t>(s.grid.ny) + 1;
    std::vector<double> xs(nx);
    for (std::size_t i = 0; i < nx; ++i)
        xs[i] = s.x_min + (s.x_max - s.x_min) * i / (nx - 1);

    sol.w.times = out_times;
    sol.w.xs = xs;
    sol.w.values.assign(nt + 1, std::vector<double>(nx, 0.0));
    sol.chars.times = out_times;
    sol.chars.y0 = edges;
    sol.chars.xi.assign(nt + 1, std::vector<double>(n_edges, 0.0));

    const bool smooth = s.v_smooth.has_value();
    std::shared_ptr<const SurrogateZ> z;
    if (!smooth) z = std::make_shared<SurrogateZ>(s.v);

    auto record_output = [&](std::size_t k, const std::vector<double>& pos,
                             const std::vector<double>& w_row) {
        sol.chars.xi[k] = pos;
        sol.w.values[k] = w_row;
        PiecewiseConstantFn q = sol.density_from(pos, mass);
        AuditRow row;
        row.t = out_times[k];
        row.mass_lagrangian = 0.0;
        for (double m : mass) row.mass_lagrangian += m;
        row.mass_eulerian = q.integrate(s.x_min, s.x_max);
        row.sup = q.sup_abs();
        row.tv = q.total_variation(s.x_min - 1.0, s.x_max + 1.0);
        if (pos.front() < s.x_min || pos.back() > s.x_max)
            throw Error("fixed_point_solve: support reached the window edge");
        sol.audit.push_back(row);
    };

    std::vector<double> pos = edges;
    std::vector<double> node_rate;  // velocity estimate per node, for prediction
    std::vector<double> w_row(nx, 0.0);
    {
        const auto pre = prefix_masses(mass);
        convolve_row(pos, pre, s.gamma, xs, w_row);
    }
    record_output(0, pos, w_row);

    const double tol_t = 1e-9 * std::max(1.0, s.T);
    double tau = 0.0;
    std::size_t next_out = 1;
    const double q0sup = s.q0_sup();
    const bool case1 = traffic_assumptions(s) && s.v.base().is_nondecreasing();

    while (tau < s.T - tol_t) {
        // window norm: max-principle bound when available, else the observed
        // sup of the restarted datum
        double q_sup_win = q0sup;
        if (!case1) {
            double obs = 0.0;
            for (std::size_t j = 0; j + 1 < pos.size(); ++j)
                obs = std::max(obs, std::abs(mass[j]) / (pos[j + 1] - pos[j]));
            q_sup_win = std::max(obs, 1e-300);
        }
        const auto hc = horizon_constants(s, q_sup_win);
        double t_end =
            (hc.K == 0.0) ? s.T : std::min(s.T, tau + solve_contraction_time(hc.K));

        // slice times: window ends plus any output times inside
        std::vector<double> S{tau};
        std::vector<int> out_idx{-1};
        std::size_t probe = next_out;
        while (probe <= static_cast<std::size_t>(nt) && out_times[probe] < t_end - tol_t) {
            S.push_back(out_times[probe]);
            out_idx.push_back(static_cast<int>(probe));
            ++probe;
        }
        if (probe <= static_cast<std::size_t>(nt) &&
            std::abs(out_times[probe] - t_end) <= tol_t) {
            t_end = out_times[probe];
            S.push_back(t_end);
            out_idx.push_back(static_cast<int>(probe));
            ++probe;
        } else {
            S.push_back(t_end);
            out_idx.push_back(-1);
        }
        if (S.size() == 2) {
            S.insert(S.begin() + 1, 0.5 * (S[0] + S[1]));
            out_idx.insert(out_idx.begin() + 1, -1);
        }
        const std::size_t n_slices = S.size();

        // Picard iteration on this window; the iterate is carried as the
        // per-slice node positions, and lambda = V(w) is evaluated exactly in
        // x from them (w is piecewise linear in x by construction).
        std::vector<std::vector<double>> XI_prev(n_slices, pos);
        std::vector<std::vector<double>> XI(n_slices, pos);
        std::vector<std::vector<double>> W(n_slices, w_row);  // grid view, for diffs/output
        const auto prefix = prefix_masses(mass);
        // predictor: extrapolate node velocities from the previous window
        if (!node_rate.empty()) {
            bool mono_ok = true;
            for (std::size_t a = 1; a < n_slices && mono_ok; ++a) {
                const double dt_a = S[a] - tau;
                auto& row = XI_prev[a];
                for (std::size_t j = 0; j < pos.size(); ++j)
                    row[j] = pos[j] + node_rate[j] * dt_a;
                for (std::size_t j = 1; j < pos.size(); ++j)
                    if (!(row[j] > row[j - 1])) mono_ok = false;
            }
            if (!mono_ok)
                for (std::size_t a = 1; a < n_slices; ++a) XI_prev[a] = pos;
            else
                for (std::size_t a = 1; a < n_slices; ++a)
                    convolve_row(XI_prev[a], prefix, s.gamma, xs, W[a]);
        }

        WindowReport rep;
        rep.t0 = tau;
        rep.t1 = t_end;
        rep.q_sup_used = q_sup_win;

        const double inv_dx = (nx - 1) / (s.x_max - s.x_min);
        std::vector<double> u0s(pos.size());
        if (!smooth)
            for (std::size_t j = 0; j < pos.size(); ++j) u0s[j] = z->prim(pos[j]);
        bool converged = false;
        for (int iter = 0; iter < max_iter && !converged; ++iter) {
            parallel_for(pos.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t j = lo; j < hi; ++j) {
                    for (std::size_t a = 0; a + 1 < n_slices; ++a) {
                        SegmentField f{&XI_prev[a], &XI_prev[a + 1], &prefix, &s.gamma,
                                       S[a], S[a + 1], s.V};
                        if (!smooth) {
                            const double u0 = u0s[j];
                            double c = z->eval(pos[j], XI[a][j]);
                            auto rhs = [&](double t, double cc) {
                                return f(t, z->prim_inverse(cc + u0));
                            };
                            c = dopri5_integrate(rhs, S[a], c, S[a + 1], tol * 0.1, {}, {},
                                                 NoStepObserver{},
                                                 std::numeric_limits<double>::infinity(),
                                                 S[a + 1] - S[a]);
                            XI[a + 1][j] = z->prim_inverse(c + u0);
                        } else {
                            const SmoothVelocity& vs = *s.v_smooth;
                            auto rhs = [&](double t, double xx) { return vs(xx) * f(t, xx); };
                            XI[a + 1][j] = dopri5_integrate(
                                rhs, S[a], XI[a][j], S[a + 1], tol * 0.1, {}, {},
                                NoStepObserver{}, std::numeric_limits<double>::infinity(),
                                S[a + 1] - S[a]);
                        }
                    }
                }
            });

            for (std::size_t a = 1; a < n_slices; ++a)
                for (std::size_t j = 1; j < pos.size(); ++j)
                    if (!(XI[a][j] > XI[a][j - 1]))
                        throw GridTooCoarse("fixed_point_solve: characteristics collided");

            double diff = 0.0;
            std::vector<double> row(nx);
            for (std::size_t a = 1; a < n_slices; ++a) {
                convolve_row(XI[a], prefix, s.gamma, xs, row);
                for (std::size_t i = 0; i < nx; ++i)
                    diff = std::max(diff, std::abs(row[i] - W[a][i]));
                W[a] = row;
                XI_prev[a] = XI[a];
            }
            rep.diffs.push_back(diff);
            converged = diff <= tol;
        }
        if (!converged)
            throw NonContraction("fixed_point_solve: Picard did not reach tol within max_iter",
                                 rep.diffs);

        // Omega bounds of the fixed-point set
        for (std::size_t a = 0; a < n_slices; ++a) {
            for (std::size_t i = 0; i < nx; ++i)
                if (std::abs(W[a][i]) > hc.M * (1.0 + 1e-9) + 1e-12)
                    throw Error("fixed_point_solve: nonlocal term left the M bound");
            for (std::size_t i = 0; i + 1 < nx; ++i)
                if (std::abs(W[a][i + 1] - W[a][i]) * inv_dx > hc.Mprime * (1.0 + 1e-9) + 1e-12)
                    throw Error("fixed_point_solve: nonlocal term left the M' bound");
        }

        for (std::size_t a = 1; a < n_slices; ++a)
            if (out_idx[a] >= 0) record_output(static_cast<std::size_t>(out_idx[a]), XI[a], W[a]);

        sol.windows.push_back(std::move(rep));
        node_rate.resize(pos.size());
        const double wlen = t_end - tau;
        for (std::size_t j = 0; j < pos.size(); ++j)
            node_rate[j] = (XI[n_slices - 1][j] - pos[j]) / wlen;
        pos = XI[n_slices - 1];
        w_row = W[n_slices - 1];
        next_out = probe;
        tau = t_end;
    }

    sol.w.M = horizon_constants(s, q0sup).M;
    sol.w.Mprime = horizon_constants(s, q0sup).Mprime;
    return sol;
}

// ---------------------------------------------------------------------------
// Solution accessors

PiecewiseConstantFn NonlocalSolution::density_from(const std::vector<double>& pos,
                                                   const std::vector<double>& mass) {
    std::vector<double> vals(pos.size() + 1, 0.0);
    for (std::size_t j = 0; j + 1 < pos.size(); ++j)
        vals[j + 1] = mass[j] / (pos[j + 1] - pos[j]);
    return PiecewiseConstantFn(pos, vals);
}

PiecewiseConstantFn NonlocalSolution::density(std::size_t k) const {
    return density_from(chars.xi.at(k), cell_mass);
}

std::size_t NonlocalSolution::time_index(double t) const {
    const auto& ts = chars.times;
    std::size_t best = 0;
    double dist = kInf;
    for (std::size_t k = 0; k < ts.size(); ++k)
        if (std::abs(ts[k] - t) < dist) {
            dist = std::abs(ts[k] - t);
            best = k;
        }
    return best;
}

double NonlocalSolution::mass_lagrangian() const {
    double m = 0.0;
    for (double c : cell_mass) m += c;
    return m;
}

double NonlocalSolution::mass_eulerian(std::size_t k) const {
    return density(k).integrate(scenario.x_min, scenario.x_max);
}

std::pair<double, double> NonlocalSolution::one_sided_density(std::size_t k,
                                                              double x_star) const {
    const auto& xi = chars.xi.at(k);
    const PiecewiseConstantFn q = density(k);
    if (x_star <= xi.front() || x_star >= xi.back()) return {0.0, 0.0};
    const auto it = std::upper_bound(xi.begin(), xi.end(), x_star);
    const std::size_t cell = static_cast<std::size_t>(it - xi.begin());  // value index of straddle
    const auto& vals = q.values();
    const double left = (cell >= 1) ? vals[cell - 1] : 0.0;
    const double right = (cell + 1 < vals.size()) ? vals[cell + 1] : 0.0;
    return {left, right};
}

std::vector<std::pair<double, double>> NonlocalSolution::eulerian_samples(std::size_t k,
                                                                          int n) const {
    const PiecewiseConstantFn q = density(k);
    std::vector<double> grid;
    grid.reserve(n + 1);
    for (int i = 0; i <= n; ++i)
        grid.push_back(scenario.x_min + (scenario.x_max - scenario.x_min) * i / n);
    const double nudge = (scenario.x_max - scenario.x_min) * 1e-12;
    for (double b : scenario.v.base().breakpoints()) {
        if (b > scenario.x_min && b < scenario.x_max) {
            grid.push_back(b - nudge);
            grid.push_back(b + nudge);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double x : grid) out.emplace_back(x, q(x));
    return out;
}

void NonlocalSolution::characteristic(double t_anchor, double x_anchor,
                                      std::span<const double> times, std::span<double> out,
                                      double tol) const {
    const double q_sup = scenario.default_q_sup();
    const double lam_sup = scenario.lambda_sup_bound(std::max(q_sup, w.sup()));
    const double lam_lip = std::abs(scenario.V.deriv()) * (w.max_slope() + 1.0);
    const LipschitzField field = w.as_field(scenario.V, lam_sup, lam_lip);
    if (scenario.v_smooth) {
        ode::characteristic_at(*scenario.v_smooth, field, t_anchor, x_anchor, times, out, tol);
    } else {
        SurrogateZ z(scenario.v);
        ode::characteristic_at(z, field, t_anchor, x_anchor, times, out, tol);
    }
}

// ---------------------------------------------------------------------------
// Standalone F application (test surface)

NonlocalTerm apply_F(const NonlocalTerm& w, const Scenario& s, double tol) {
    const auto edges = build_edges(s);
    std::vector<double> mass(edges.size() - 1);
    for (std::size_t j = 0; j + 1 < edges.size(); ++j)
        mass[j] = s.q0(0.5 * (edges[j] + edges[j + 1])) * (edges[j + 1] - edges[j]);

    const double q_sup = s.default_q_sup();
    const double lam_sup = s.lambda_sup_bound(std::max(q_sup, w.sup()));
    const double lam_lip = std::abs(s.V.deriv()) * (w.max_slope() + 1.0);
    const LipschitzField field = w.as_field(s.V, lam_sup, lam_lip);

    NonlocalTerm out;
    out.times = w.times;
    out.xs = w.xs;
    out.values.assign(w.times.size(), std::vector<double>(w.xs.size(), 0.0));
    out.M = w.M;
    out.Mprime = w.Mprime;

    std::vector<std::vector<double>> xi(w.times.size(), std::vector<double>(edges.size()));
    std::optional<SurrogateZ> z;
    if (!s.v_smooth) z.emplace(s.v);
    parallel_for(edges.size(), [&](std::size_t lo, std::size_t hi) {
        std::vector<double> buf(w.times.size());
        for (std::size_t j = lo; j < hi; ++j) {
            if (s.v_smooth)
                ode::characteristic_at(*s.v_smooth, field, 0.0, edges[j], w.times, buf, tol);
            else
                ode::characteristic_at(*z, field, 0.0, edges[j], w.times, buf, tol);
            for (std::size_t k = 0; k < w.times.size(); ++k) xi[k][j] = buf[k];
        }
    });

    const auto pre = prefix_masses(mass);
    for (std::size_t k = 0; k < w.times.size(); ++k) {
        for (std::size_t j = 1; j < edges.size(); ++j)
            if (!(xi[k][j] > xi[k][j - 1]))
                throw GridTooCoarse("apply_F: characteristics collided");
        convolve_row(xi[k], pre, s.gamma, w.xs, out.values[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Audits

MaxPrincipleReport max_principle_audit(const NonlocalSolution& sol, MaxPrincipleCase which) {
    const Scenario& s = sol.scenario;
    if (s.V.deriv() > 0.0)
        throw PreconditionViolation("max_principle_audit: requires V' <= 0");
    if (s.q0.min_value() < 0.0)
        throw PreconditionViolation("max_principle_audit: requires q0 >= 0");
    if (!s.gamma.monotone_decreasing() || s.gamma.shape().breakpoints().front() < 0.0)
        throw PreconditionViolation(
            "max_principle_audit: requires gamma supported in [0,A], monotone decreasing");

    double observed = 0.0;
    for (const auto& row : sol.audit) observed = std::max(observed, row.sup);

    MaxPrincipleReport rep;
    rep.which = which;
    rep.observed = observed;
    const double vup = s.v.upper(), vlo = s.v.lower();
    switch (which) {
        case MaxPrincipleCase::MonotoneIncreasingV: {
            if (!s.v.base().is_nondecreasing())
                throw PreconditionViolation(
                    "max_principle_audit: case 1 requires monotonically increasing v");
            rep.bound = s.q0_sup();
            break;
        }
        case MaxPrincipleCase::StrictlyDecreasingVlaw: {
            if (!(s.V.deriv() < 0.0))
                throw PreconditionViolation(
                    "max_principle_audit: case 2 requires esssup V' < 0");
            const double t1 = sup_v_times_q0(s) / vlo;
            const double t2 = (vup / vlo) * s.q0_l1();  // |V'|/(-esssup V') = 1 (affine)
            rep.bound = std::max(t1, t2);
            break;
        }
        case MaxPrincipleCase::Exponential: {
            // valid whenever V' <= 0: the quadratic damping term is dropped
            const double rate =
                vup * std::abs(s.V.deriv()) * s.gamma.value_at_zero() * s.q0_l1();
            const double base = sup_v_times_q0(s) / vlo;
            double worst_margin = kInf;
            for (const auto& row : sol.audit)
                worst_margin = std::min(worst_margin, base * std::exp(rate * row.t) - row.sup);
            rep.bound = base * std::exp(rate * s.T);
            rep.margin = worst_margin;
            rep.pass = worst_margin >= 0.0;
            return rep;
        }
    }
    rep.margin = rep.bound - observed;
    rep.pass = rep.margin >= 0.0;
    return rep;
}

double weak_error(const NonlocalSolution& a, const NonlocalSolution& b,
                  const PiecewiseLinear& g) {
    if (a.chars.times.size() != b.chars.times.size())
        throw InvalidParameter("weak_error: output grids differ");
    auto pairing = [&g](const NonlocalSolution& s, std::size_t k) {
        const auto& xi = s.chars.xi[k];
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < xi.size(); ++j) {
            const double d = xi[j + 1] - xi[j];
            acc += s.cell_mass[j] * (g.primitive(xi[j + 1]) - g.primitive(xi[j])) / d;
        }
        return acc;
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < a.chars.times.size(); ++k)
        worst = std::max(worst, std::abs(pairing(a, k) - pairing(b, k)));
    return worst;
}

PiecewiseLinear hat_function(double lo, double hi) {
    return PiecewiseLinear({lo, 0.5 * (lo + hi), hi}, {0.0, 1.0, 0.0});
}

} // namespace discflow::nonlocal
