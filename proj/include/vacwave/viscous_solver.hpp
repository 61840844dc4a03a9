#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vacwave/approx_wave.hpp"
#include "vacwave/exact_wave.hpp"

namespace vacwave {

/// Regularization of the viscosity, mu_eps(rho) = B rho^alpha + eps rho^theta
/// with theta = 1/2, plus the density cut-off nu and the initial-data floor
/// min(nu, eps^{2/(2 alpha - 1)}/2).  nu is coupled to eps as nu = eps^{2/3};
/// the decoupled constructor exists for experiments only and marks the pair
/// non-conforming.
struct RegParams {
    double epsilon = 1e-3;
    double theta   = 0.5;
    double nu      = 0.0;
    double floor   = 0.0;
    bool decoupled = false;

    static RegParams coupled(double eps, const FarField& ff) {
        if (!(eps > 0.0)) throw std::invalid_argument("RegParams: epsilon must be positive");
        RegParams rp;
        rp.epsilon = eps;
        rp.nu = std::cbrt(eps * eps);
        rp.floor = std::min(rp.nu, 0.5 * std::pow(eps, 2.0 / (2.0 * ff.alpha - 1.0)));
        return rp;
    }

    static RegParams with_nu(double eps, double nu, const FarField& ff) {
        RegParams rp = coupled(eps, ff);
        if (!(nu > 0.0)) throw std::invalid_argument("RegParams: nu must be positive");
        rp.nu = nu;
        rp.floor = std::min(nu, 0.5 * std::pow(eps, 2.0 / (2.0 * ff.alpha - 1.0)));
        rp.decoupled = std::fabs(nu - std::cbrt(eps * eps)) > 1e-12 * std::max(1.0, nu);
        return rp;
    }
};

inline double mu_eps(double rho, const RegParams& rp, const FarField& ff) {
    return ff.B * fast_pow(rho, ff.alpha) + rp.epsilon * std::sqrt(rho);
}

/// Cell-centered state on a uniform grid.
struct SimState {
    double t  = 0.0;
    double dx = 0.0;
    double x0 = 0.0;  ///< left edge of the domain
    std::vector<double> rho;
    std::vector<double> m;

    double cell_center(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * dx; }
    std::size_t size() const { return rho.size(); }

    void validate() const {
        if (rho.size() != m.size() || rho.size() < 16)
            throw std::invalid_argument("SimState: rho/m must have equal length >= 16");
        if (!(dx > 0.0)) throw std::invalid_argument("SimState: dx must be positive");
    }
};

struct SolverConfig {
    double x_left  = -60.0;
    double x_right = 160.0;
    int n_cells    = 4400;
    double cfl     = 0.45;
    double t_end   = 80.0;
    enum class Bc { fixed, wave_following } bc = Bc::wave_following;
    enum class Scheme { euler, ssp2 } scheme = Scheme::euler;
    double plm_theta = 1.5;  ///< slope-limiter parameter in [1, 2]

    void validate() const {
        if (!(x_left < x_right)) throw std::invalid_argument("SolverConfig: x_left < x_right required");
        if (n_cells < 16) throw std::invalid_argument("SolverConfig: n_cells must be >= 16");
        if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("SolverConfig: cfl must lie in (0,1)");
        if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be >= 0");
        if (!(plm_theta >= 1.0 && plm_theta <= 2.0))
            throw std::invalid_argument("SolverConfig: plm_theta must lie in [1,2]");
    }
};

/// Two ghost cells on one side; index 0 is adjacent to the domain.
struct GhostCells {
    std::array<double, 2> rho{0.0, 0.0};
    std::array<double, 2> m{0.0, 0.0};
};

/// Optional manufactured-solution source; returns (s_rho, s_m) at (t, x).
using SourceFn = std::function<std::array<double, 2>(double, double)>;

/// Per-step accounting used by the conservation and positivity checks.
struct StepInfo {
    double dt = 0.0;
    double mass_before = 0.0;
    double mass_after = 0.0;       ///< after clamping
    double mass_unclamped = 0.0;   ///< before clamping
    double flux_mass_left = 0.0;   ///< mass flux through the left boundary face
    double flux_mass_right = 0.0;
    double source_mass = 0.0;      ///< dt * integral of s_rho
    double clamped_mass = 0.0;     ///< mass added by the floor clamp this step
};

namespace detail {

inline double minmod3(double a, double b, double c) {
    if (a > 0 && b > 0 && c > 0) return std::min({a, b, c});
    if (a < 0 && b < 0 && c < 0) return std::max({a, b, c});
    return 0.0;
}

/// Generalised-minmod slope; plm_theta = 1 is minmod, 2 is MC.
inline double plm_slope(double vl, double vc, double vr, double theta) {
    return minmod3(theta * (vc - vl), 0.5 * (vr - vl), theta * (vr - vc));
}

}  // namespace detail

/// Scratch buffers reused across steps.
struct StepWorkspace {
    std::vector<double> re, me, sre, sme, frho, fm, rho_new, m_new;
    void resize(std::size_t n) {
        re.resize(n + 4);
        me.resize(n + 4);
        sre.resize(n + 4);
        sme.resize(n + 4);
        frho.resize(n + 1);
        fm.resize(n + 1);
        rho_new.resize(n);
        m_new.resize(n);
    }
};

/// One explicit Euler step of the regularized system.  Convection by a
/// slope-reconstructed local Lax-Friedrichs (Rusanov) flux, diffusion
/// (mu_eps(rho) u_x)_x by centered differences with the face viscosity at the
/// arithmetic-mean density.  Density is clamped to the floor afterwards and
/// the clamped mass is accounted.
inline StepInfo step(SimState& s, double dt, const RegParams& rp, const FarField& ff,
                     const GhostCells& gl, const GhostCells& gr, double plm_theta,
                     StepWorkspace& ws, const SourceFn* src = nullptr) {
    const std::size_t n = s.size();
    ws.resize(n);
    const double dx = s.dx;

    // extended arrays with two ghosts per side
    ws.re[0] = gl.rho[1]; ws.re[1] = gl.rho[0];
    ws.me[0] = gl.m[1];   ws.me[1] = gl.m[0];
    for (std::size_t i = 0; i < n; ++i) { ws.re[i + 2] = s.rho[i]; ws.me[i + 2] = s.m[i]; }
    ws.re[n + 2] = gr.rho[0]; ws.re[n + 3] = gr.rho[1];
    ws.me[n + 2] = gr.m[0];   ws.me[n + 3] = gr.m[1];

    for (std::size_t i = 1; i < n + 3; ++i) {
        ws.sre[i] = detail::plm_slope(ws.re[i - 1], ws.re[i], ws.re[i + 1], plm_theta);
        ws.sme[i] = detail::plm_slope(ws.me[i - 1], ws.me[i], ws.me[i + 1], plm_theta);
    }

    const double g = ff.gamma, A = ff.A;
    const double cgam = A * g;
    // faces j = 0..n between extended cells (j+1, j+2)
    for (std::size_t j = 0; j <= n; ++j) {
        const std::size_t L = j + 1, R = j + 2;
        double rl = ws.re[L] + 0.5 * ws.sre[L];
        double rr = ws.re[R] - 0.5 * ws.sre[R];
        const double ml = ws.me[L] + 0.5 * ws.sme[L];
        const double mr = ws.me[R] - 0.5 * ws.sme[R];
        rl = std::max(rl, rp.floor);
        rr = std::max(rr, rp.floor);
        const double ul = ml / rl, ur = mr / rr;
        const double cl = std::sqrt(cgam * fast_pow(rl, g - 1.0));
        const double cr = std::sqrt(cgam * fast_pow(rr, g - 1.0));
        const double a = std::max(std::fabs(ul) + cl, std::fabs(ur) + cr);
        const double pl = A * fast_pow(rl, g), pr = A * fast_pow(rr, g);

        // convective Rusanov flux
        double f0 = 0.5 * (ml + mr) - 0.5 * a * (rr - rl);
        double f1 = 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * a * (mr - ml);

        // viscous momentum flux -mu u_x at the face, cell-centered gradient
        const double mu_face = mu_eps(0.5 * (ws.re[L] + ws.re[R]), rp, ff);
        const double u_gl = ws.me[L] / ws.re[L];
        const double u_gr = ws.me[R] / ws.re[R];
        f1 -= mu_face * (u_gr - u_gl) / dx;

        ws.frho[j] = f0;
        ws.fm[j] = f1;
    }

    StepInfo info;
    info.dt = dt;
    info.flux_mass_left = ws.frho[0];
    info.flux_mass_right = ws.frho[n];

    double mass_before = 0.0, mass_unclamped = 0.0, mass_after = 0.0, clamped = 0.0;
    double source_mass = 0.0;
    const double lam = dt / dx;
    for (std::size_t i = 0; i < n; ++i) {
        mass_before += s.rho[i];
        double rn = s.rho[i] - lam * (ws.frho[i + 1] - ws.frho[i]);
        double mn = s.m[i] - lam * (ws.fm[i + 1] - ws.fm[i]);
        if (src) {
            const auto sv = (*src)(s.t, s.cell_center(i));
            rn += dt * sv[0];
            mn += dt * sv[1];
            source_mass += dt * sv[0];
        }
        mass_unclamped += rn;
        if (!(rn >= rp.floor)) {
            if (std::isnan(rn) || std::isnan(mn))
                throw std::runtime_error("step: NaN detected at cell " + std::to_string(i) +
                                         ", t=" + std::to_string(s.t));
            const double u_old = s.m[i] / s.rho[i];
            clamped += rp.floor - rn;
            rn = rp.floor;
            mn = u_old * rp.floor;
        }
        mass_after += rn;
        ws.rho_new[i] = rn;
        ws.m_new[i] = mn;
    }
    // single NaN sweep over momenta (density NaN is caught by the clamp test)
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(ws.m_new[i]))
            throw std::runtime_error("step: NaN detected at cell " + std::to_string(i) +
                                     ", t=" + std::to_string(s.t));

    s.rho.swap(ws.rho_new);
    s.m.swap(ws.m_new);
    s.t += dt;

    info.mass_before = mass_before * dx;
    info.mass_unclamped = mass_unclamped * dx;
    info.mass_after = mass_after * dx;
    info.clamped_mass = clamped * dx;
    info.source_mass = source_mass * dx;
    return info;
}

/// Stable time step: the hyperbolic bound dx / max(|u| + c) combined with the
/// explicit-diffusion bound dx^2 / (2 max mu_eps(rho)/rho).  The maxima are
/// taken over cells with rho > floor (all cells when none qualify).
inline double cfl_dt(const SimState& s, const RegParams& rp, const FarField& ff, double cfl) {
    if (s.size() == 0) throw std::invalid_argument("cfl_dt: empty grid");
    const double g = ff.gamma, cgam = ff.A * g;
    double max_speed = 0.0, max_kvisc = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = s.rho[i];
        if (!(r > rp.floor)) continue;
        any = true;
        const double u = s.m[i] / r;
        max_speed = std::max(max_speed, std::fabs(u) + std::sqrt(cgam * fast_pow(r, g - 1.0)));
        max_kvisc = std::max(max_kvisc, mu_eps(r, rp, ff) / r);
    }
    if (!any) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double r = std::max(s.rho[i], rp.floor);
            const double u = s.m[i] / r;
            max_speed = std::max(max_speed, std::fabs(u) + std::sqrt(cgam * fast_pow(r, g - 1.0)));
            max_kvisc = std::max(max_kvisc, mu_eps(r, rp, ff) / r);
        }
    }
    const double hyp = max_speed > 0.0 ? s.dx / max_speed : std::numeric_limits<double>::infinity();
    const double visc = max_kvisc > 0.0 ? s.dx * s.dx / (2.0 * max_kvisc)
                                        : std::numeric_limits<double>::infinity();
    return cfl * std::min(hyp, visc);
}

/// Ghost-cell values for both boundaries at time t.
struct BoundaryModel {
    SolverConfig::Bc bc = SolverConfig::Bc::wave_following;
    const FarField* ff = nullptr;
    const WaveParams* wp = nullptr;
    const RegParams* rp = nullptr;
    mutable double x0l = 0.0, x0r = 0.0;  // Newton warm starts

    GhostCells left(const SimState& s) const {
        GhostCells gc;
        if (bc == SolverConfig::Bc::fixed) {
            const FanState c = cutoff_state(rp->nu, *ff);
            gc.rho = {c.rho, c.rho};
            gc.m = {c.m, c.m};
            return gc;
        }
        for (int k = 0; k < 2; ++k) {
            const double x = s.x0 - (k + 0.5) * s.dx;
            const SmoothWaveEval ev = smooth_wave(s.t, x, *ff, *wp, &x0l);
            gc.rho[k] = std::max(ev.rho_bar, rp->floor);
            gc.m[k] = gc.rho[k] * ev.u_bar;
        }
        return gc;
    }

    GhostCells right(const SimState& s) const {
        GhostCells gc;
        if (bc == SolverConfig::Bc::fixed) {
            gc.rho = {ff->rho_plus, ff->rho_plus};
            gc.m = {ff->rho_plus * ff->u_plus, ff->rho_plus * ff->u_plus};
            return gc;
        }
        const double xr = s.x0 + s.dx * static_cast<double>(s.size());
        for (int k = 0; k < 2; ++k) {
            const double x = xr + (k + 0.5) * s.dx;
            const SmoothWaveEval ev = smooth_wave(s.t, x, *ff, *wp, &x0r);
            gc.rho[k] = std::max(ev.rho_bar, rp->floor);
            gc.m[k] = gc.rho[k] * ev.u_bar;
        }
        return gc;
    }
};

struct RunHooks {
    /// Called after every accepted step.
    std::function<void(const SimState&, const StepInfo&)> on_step;
    /// Called at every observation time (including t = 0).
    std::function<void(const SimState&)> on_observe;
};

/// Advance the state to t_end, invoking hooks.on_observe exactly at the
/// requested times.  Deterministic: the dt sequence depends only on the
/// state.  Warns when eps ln(1+t_end) exceeds 1, the regime in which the
/// uniform-in-time estimates are no longer guaranteed.
inline std::vector<double> run(SimState& s, const SolverConfig& cfg, const RegParams& rp,
                               const FarField& ff, const WaveParams& wp,
                               std::vector<double> observe_times, const RunHooks& hooks,
                               const SourceFn* src = nullptr, std::ostream* warn = nullptr) {
    cfg.validate();
    s.validate();
    if (warn && rp.epsilon * std::log1p(cfg.t_end) > 1.0)
        *warn << "warning: eps*ln(1+t_end) = " << rp.epsilon * std::log1p(cfg.t_end)
              << " > 1; uniform-in-time bounds are not guaranteed in this regime\n";

    std::sort(observe_times.begin(), observe_times.end());
    BoundaryModel bm{cfg.bc, &ff, &wp, &rp};
    StepWorkspace ws;
    std::vector<double> observed;

    auto observe_due = [&](double t) {
        return !observe_times.empty() && t >= observe_times.front() - 1e-13;
    };
    auto flush_observations = [&](double t) {
        while (observe_due(t)) {
            if (hooks.on_observe) hooks.on_observe(s);
            observed.push_back(observe_times.front());
            observe_times.erase(observe_times.begin());
        }
    };

    flush_observations(s.t);
    SimState stage;  // ssp2 scratch
    while (s.t < cfg.t_end - 1e-13) {
        double dt = cfl_dt(s, rp, ff, cfg.cfl);
        double target = cfg.t_end;
        if (!observe_times.empty()) target = std::min(target, observe_times.front());
        dt = std::min(dt, target - s.t);
        if (dt < 1e-12)
            throw std::runtime_error("run: time step underflow (dt = " + std::to_string(dt) +
                                     " at t = " + std::to_string(s.t) + "), aborting as stiff");

        StepInfo info;
        if (cfg.scheme == SolverConfig::Scheme::euler) {
            info = step(s, dt, rp, ff, bm.left(s), bm.right(s), cfg.plm_theta, ws, src);
        } else {
            // SSP-RK2 (Heun): average of the forward state and a second stage
            stage = s;
            info = step(stage, dt, rp, ff, bm.left(stage), bm.right(stage), cfg.plm_theta, ws, src);
            StepInfo i2 = step(stage, dt, rp, ff, bm.left(stage), bm.right(stage), cfg.plm_theta, ws, src);
            for (std::size_t i = 0; i < s.size(); ++i) {
                stage.rho[i] = 0.5 * (s.rho[i] + stage.rho[i]);
                stage.m[i] = 0.5 * (s.m[i] + stage.m[i]);
            }
            stage.t = s.t + dt;
            double clamped = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (!(stage.rho[i] >= rp.floor)) {
                    clamped += (rp.floor - stage.rho[i]) * s.dx;
                    stage.rho[i] = rp.floor;
                }
            }
            s = stage;
            info.dt = dt;
            info.flux_mass_left = 0.5 * (info.flux_mass_left + i2.flux_mass_left);
            info.flux_mass_right = 0.5 * (info.flux_mass_right + i2.flux_mass_right);
            info.clamped_mass = 0.5 * (info.clamped_mass + i2.clamped_mass) + clamped;
        }
        if (hooks.on_step) hooks.on_step(s, info);
        flush_observations(s.t);
    }
    flush_observations(cfg.t_end + 1e-12);  // t_end itself, if listed
    return observed;
}

/// Cell sampling of initial profiles with the regularisation applied:
/// momentum is zeroed wherever the density profile vanishes, then the density
/// is clamped to the floor.  The profile far fields must match the cut-off
/// state on the left and (rho_+, m_+) on the right (a smooth-wave tail is
/// accepted); a mismatch is a configuration error.
template <class RhoFn, class MFn>
SimState regularize_initial(RhoFn&& rho0, MFn&& m0, const SolverConfig& cfg, const RegParams& rp,
                            const FarField& ff, const WaveParams& wp) {
    cfg.validate();
    SimState s;
    s.t = 0.0;
    s.x0 = cfg.x_left;
    s.dx = (cfg.x_right - cfg.x_left) / cfg.n_cells;
    s.rho.resize(cfg.n_cells);
    s.m.resize(cfg.n_cells);

    // far-field gate, checked against the cut-off state / right state with a
    // tolerance wide enough for the smooth-wave tail at a finite boundary
    const FanState lc = cutoff_state(rp.nu, ff);
    double x0c = 0.0;
    const SmoothWaveEval lw = smooth_wave(0.0, cfg.x_left, ff, wp, &x0c);
    const SmoothWaveEval rw = smooth_wave(0.0, cfg.x_right, ff, wp, &x0c);
    const double rL = rho0(cfg.x_left), rR = rho0(cfg.x_right);
    const double mL = m0(cfg.x_left), mR = m0(cfg.x_right);
    const double mtolL = 0.1 * std::max({std::fabs(lc.m), std::fabs(lw.rho_bar * lw.u_bar), 1e-6});
    const bool left_ok = approx_equal(rL, lc.rho, 0.1, 1e-10) || approx_equal(rL, lw.rho_bar, 0.1, 1e-10);
    const bool left_m_ok = std::fabs(mL - lc.m) <= mtolL ||
                           std::fabs(mL - lw.rho_bar * lw.u_bar) <= mtolL;
    const bool right_ok = approx_equal(rR, ff.rho_plus, 0.1) || approx_equal(rR, rw.rho_bar, 0.1);
    const double m_plus = ff.rho_plus * ff.u_plus;
    const double mtolR = 0.1 * std::max({std::fabs(m_plus), std::fabs(rw.rho_bar * rw.u_bar), 1e-6});
    const bool right_m_ok = std::fabs(mR - m_plus) <= mtolR ||
                            std::fabs(mR - rw.rho_bar * rw.u_bar) <= mtolR;
    if (!left_ok || !left_m_ok)
        throw std::invalid_argument("regularize_initial: left far field does not match the cut-off state (nu=" +
                                    std::to_string(rp.nu) + ")");
    if (!right_ok || !right_m_ok)
        throw std::invalid_argument("regularize_initial: right far field does not match (rho_+, m_+)");

    for (int i = 0; i < cfg.n_cells; ++i) {
        const double x = s.cell_center(i);
        double r = rho0(x);
        double mm = (r == 0.0) ? 0.0 : m0(x);
        if (r < rp.floor) r = rp.floor;
        s.rho[i] = r;
        s.m[i] = mm;
    }
    s.validate();
    return s;
}

}  // namespace vacwave
