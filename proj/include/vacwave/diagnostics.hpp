#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vacwave/approx_wave.hpp"
#include "vacwave/exact_wave.hpp"
#include "vacwave/viscous_solver.hpp"

namespace vacwave {

/// Relative entropy density Psi(rho, rho_bar) = int_{rho_bar}^{rho}
/// (p(s) - p(rho_bar))/s^2 ds in its closed bracket form
///   A/((gamma-1) rho) [rho^g - rb^g - g rb^{g-1}(rho - rb)].
/// Undefined at rho = 0; use rho_psi for the weighted, continuous version.
inline double psi(double rho, double rho_bar, const FarField& ff) {
    if (!(rho > 0.0)) throw std::domain_error("psi: need rho > 0 (use rho_psi at vacuum)");
    if (rho_bar < 0.0) throw std::domain_error("psi: need rho_bar >= 0");
    const double g = ff.gamma;
    const double bracket = fast_pow(rho, g) - fast_pow(rho_bar, g) -
                           g * fast_pow(rho_bar, g - 1.0) * (rho - rho_bar);
    return ff.A * bracket / ((g - 1.0) * rho);
}

/// rho * Psi(rho, rho_bar), extended continuously to rho = 0 where it equals
/// A rho_bar^gamma (the bracket at rho = 0 is (gamma-1) rho_bar^gamma).
inline double rho_psi(double rho, double rho_bar, const FarField& ff) {
    if (rho < 0.0) throw std::domain_error("rho_psi: need rho >= 0");
    const double g = ff.gamma;
    const double bracket = fast_pow(rho, g) - fast_pow(rho_bar, g) -
                           g * fast_pow(rho_bar, g - 1.0) * (rho - rho_bar);
    return ff.A * bracket / (g - 1.0);
}

/// Uniform constant in the quadratic lower bound
///   rho Psi(rho, rho_bar) >= c (rho - rho_bar)^2   on {rho <= cap, rho_bar <= rho_plus},
/// valid for 1 < gamma <= 2.  The Taylor remainder of s^gamma gives
/// rho Psi = A (gamma/2) xi^{gamma-2} (rho-rho_bar)^2 with xi between the two
/// densities, hence c = A (gamma/2) max(rho_plus, cap)^{gamma-2}.
inline double rho_psi_quadratic_constant(double cap, const FarField& ff) {
    const double M = std::max(ff.rho_plus, cap);
    return ff.A * 0.5 * ff.gamma * fast_pow(M, ff.gamma - 2.0);
}

/// BD-entropy potential phi_eps(rho) with theta = 1/2:
///   B rho^{alpha-1}/(alpha-1) - 2 eps rho^{-1/2}   (alpha != 1)
///   B ln(rho)                - 2 eps rho^{-1/2}   (alpha  = 1)
inline double bd_phi(double rho, const RegParams& rp, const FarField& ff) {
    if (!(rho > 0.0)) throw std::domain_error("bd_phi: need rho > 0");
    const double theta_part = rp.epsilon * fast_pow(rho, rp.theta - 1.0) / (rp.theta - 1.0);
    if (std::fabs(ff.alpha - 1.0) < 1e-12) return ff.B * std::log(rho) + theta_part;
    return ff.B * fast_pow(rho, ff.alpha - 1.0) / (ff.alpha - 1.0) + theta_part;
}

/// Centered difference of phi_eps(rho) over the grid; one-sided at the ends.
inline std::vector<double> bd_phi_x(std::span<const double> rho, const RegParams& rp,
                                    const FarField& ff, double dx) {
    std::vector<double> phi(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) phi[i] = bd_phi(rho[i], rp, ff);
    return gradient(phi, dx);
}

/// Smooth-wave samples at all cell centers of a state, computed with a
/// single warm-started sweep (the characteristic foot is monotone in x).
struct WaveSamples {
    std::vector<double> rho_bar, u_bar, u_bar_x;
};

inline WaveSamples sample_wave(const SimState& s, const FarField& ff, const WaveParams& wp) {
    WaveSamples ws;
    const std::size_t n = s.size();
    ws.rho_bar.resize(n);
    ws.u_bar.resize(n);
    ws.u_bar_x.resize(n);
    double x0c = s.cell_center(0) - wp.w_minus * (1.0 + s.t);
    for (std::size_t i = 0; i < n; ++i) {
        const SmoothWaveEval ev = smooth_wave(s.t, s.cell_center(i), ff, wp, &x0c);
        ws.rho_bar[i] = ev.rho_bar;
        ws.u_bar[i] = ev.u_bar;
        ws.u_bar_x[i] = ev.u_bar_x;
    }
    return ws;
}

/// Time-cumulative dissipation integrals of the a-priori estimate, advanced
/// by a dt-weighted trapezoid rule on the accumulation schedule.  All four
/// integrands are pointwise nonnegative, so the accumulators are
/// nondecreasing by construction.
struct DissipationAccumulators {
    double D_pres = 0.0, D_kin = 0.0, D_visc = 0.0, D_dens = 0.0;
    double last_t = std::numeric_limits<double>::quiet_NaN();
    double I_pres = 0.0, I_kin = 0.0, I_visc = 0.0, I_dens = 0.0;

    void accumulate(const SimState& s, const RegParams& rp, const FarField& ff,
                    const WaveParams& wp) {
        const WaveSamples w = sample_wave(s, ff, wp);
        accumulate_with(s, rp, ff, w);
    }

    void accumulate_with(const SimState& s, const RegParams& rp, const FarField& ff,
                         const WaveSamples& w) {
        const std::size_t n = s.size();
        const double g = ff.gamma;
        const double b = 0.5 * (g + ff.alpha - 1.0);
        std::vector<double> du(n), dd(n);
        for (std::size_t i = 0; i < n; ++i) {
            du[i] = s.m[i] / s.rho[i] - w.u_bar[i];
            dd[i] = fast_pow(s.rho[i], b) - fast_pow(w.rho_bar[i], b);
        }
        const std::vector<double> du_x = gradient(du, s.dx);
        const std::vector<double> dd_x = gradient(dd, s.dx);

        double ip = 0, ik = 0, iv = 0, id = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = s.rho[i], rb = w.rho_bar[i];
            const double prel = ff.A * (fast_pow(r, g) - fast_pow(rb, g) -
                                        g * fast_pow(rb, g - 1.0) * (r - rb));
            ip += w.u_bar_x[i] * prel;
            ik += r * w.u_bar_x[i] * du[i] * du[i];
            iv += mu_eps(r, rp, ff) * du_x[i] * du_x[i];
            id += dd_x[i] * dd_x[i];
        }
        ip *= s.dx; ik *= s.dx; iv *= s.dx; id *= s.dx;

        if (!std::isnan(last_t)) {
            const double h = 0.5 * (s.t - last_t);
            D_pres += h * (I_pres + ip);
            D_kin  += h * (I_kin + ik);
            D_visc += h * (I_visc + iv);
            D_dens += h * (I_dens + id);
        }
        last_t = s.t;
        I_pres = ip; I_kin = ik; I_visc = iv; I_dens = id;
    }
};

/// Snapshot of every functional in the a-priori estimates at one time.
struct FunctionalReport {
    double t = 0.0;
    double E_kin = 0.0;   ///< int rho (u - u_bar)^2 dx
    double E_ent = 0.0;   ///< int rho Psi(rho, rho_bar) dx
    double E_grad = 0.0;  ///< int [(rho^{alpha-1/2})_x]^2 dx
    double E_bd = 0.0;    ///< int rho [(u - u_bar) + (phi_eps(rho))_x]^2 dx
    double D_pres = 0.0, D_kin = 0.0, D_visc = 0.0, D_dens = 0.0;  ///< cumulative
    double sup_dist = 0.0;           ///< sup_x |rho - rho_bar|
    double f_decay = 0.0;            ///< int (rho^s - rho_bar^s)^{4+2l} dx
    double lambda_flux_proxy = 0.0;  ///< int rho^alpha [(u - u_bar)_x]^2 dx
    double m3_cubic = 0.0;           ///< int rho |u - u_bar|^3 dx (optional column)

    static std::string csv_header() {
        return "t,E_kin,E_ent,E_grad,E_bd,D_pres,D_kin,D_visc,D_dens,sup_dist,f_decay,"
               "lambda_flux_proxy,m3_cubic";
    }
    std::string csv_row() const {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                      t, E_kin, E_ent, E_grad, E_bd, D_pres, D_kin, D_visc, D_dens, sup_dist,
                      f_decay, lambda_flux_proxy, m3_cubic);
        return buf;
    }
};

/// Default decay-monitor exponent s = b + 3/2 with b = (alpha+gamma-1)/2,
/// comfortably inside the admissible range s > b + 1.
inline double default_f_decay_exponent(const FarField& ff) {
    return 0.5 * (ff.alpha + ff.gamma - 1.0) + 1.5;
}

inline double f_decay_of(std::span<const double> rho, std::span<const double> rho_bar, double dx,
                         const FarField& ff, double s_exp, int l) {
    const double b = 0.5 * (ff.alpha + ff.gamma - 1.0);
    if (!(s_exp > b + 1.0))
        throw std::invalid_argument("f_decay: need s > (alpha+gamma-1)/2 + 1 (= " +
                                    std::to_string(b + 1.0) + ")");
    if (l < 1) throw std::invalid_argument("f_decay: need l >= 1");
    const double expo = 4.0 + 2.0 * l;
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double d = fast_pow(rho[i], s_exp) - fast_pow(rho_bar[i], s_exp);
        acc += std::pow(d, expo);
    }
    return acc * dx;
}

/// Full functional report by midpoint quadrature on the grid; cumulative
/// dissipation values are copied from the accumulators.
inline FunctionalReport functional_report(const SimState& s, const RegParams& rp,
                                          const FarField& ff, const WaveParams& wp,
                                          const DissipationAccumulators& acc, double s_exp,
                                          int l) {
    const WaveSamples w = sample_wave(s, ff, wp);
    const std::size_t n = s.size();

    FunctionalReport fr;
    fr.t = s.t;
    fr.D_pres = acc.D_pres;
    fr.D_kin = acc.D_kin;
    fr.D_visc = acc.D_visc;
    fr.D_dens = acc.D_dens;

    std::vector<double> du(n), ralpha(n);
    for (std::size_t i = 0; i < n; ++i) {
        du[i] = s.m[i] / s.rho[i] - w.u_bar[i];
        ralpha[i] = fast_pow(s.rho[i], ff.alpha - 0.5);
    }
    const std::vector<double> du_x = gradient(du, s.dx);
    const std::vector<double> gr = gradient(ralpha, s.dx);
    const std::vector<double> phix = bd_phi_x(s.rho, rp, ff, s.dx);

    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.rho[i];
        fr.E_kin += r * du[i] * du[i];
        fr.E_ent += rho_psi(r, w.rho_bar[i], ff);
        fr.E_grad += gr[i] * gr[i];
        const double bd = du[i] + phix[i];
        fr.E_bd += r * bd * bd;
        fr.lambda_flux_proxy += fast_pow(r, ff.alpha) * du_x[i] * du_x[i];
        const double a = std::fabs(du[i]);
        fr.m3_cubic += r * a * a * a;
        fr.sup_dist = std::max(fr.sup_dist, std::fabs(r - w.rho_bar[i]));
    }
    fr.E_kin *= s.dx;
    fr.E_ent *= s.dx;
    fr.E_grad *= s.dx;
    fr.E_bd *= s.dx;
    fr.lambda_flux_proxy *= s.dx;
    fr.m3_cubic *= s.dx;
    fr.f_decay = f_decay_of(s.rho, w.rho_bar, s.dx, ff, s_exp, l);
    return fr;
}

enum class DistanceTarget { exact, smooth };

/// sup- or L^p-distance of the density to the exact fan or the smooth wave;
/// only p > 2 is meaningful for the vacuum-connected wave (p = infinity for
/// the sup norm).  At t = 0 the exact target degenerates to the Riemann data.
inline double sup_and_lp_distance(const SimState& s, const FarField& ff, const WaveParams& wp,
                                  DistanceTarget target, double p) {
    if (!(p > 2.0)) throw std::invalid_argument("sup_and_lp_distance: need p > 2");
    const std::size_t n = s.size();
    std::vector<double> diff(n);
    if (target == DistanceTarget::smooth) {
        const WaveSamples w = sample_wave(s, ff, wp);
        for (std::size_t i = 0; i < n; ++i) diff[i] = s.rho[i] - w.rho_bar[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = s.cell_center(i);
            double rr;
            if (s.t > 0.0) {
                rr = exact_wave(x / s.t, ff).rho;
            } else {
                rr = x < 0.0 ? 0.0 : ff.rho_plus;  // Riemann data limit
            }
            diff[i] = s.rho[i] - rr;
        }
    }
    return grid_lp(diff, s.dx, p);
}

/// One stored observation of the density field.
struct TrajectoryFrame {
    double t = 0.0;
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> rho;

    double cell_center(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * dx; }
};

struct RegionCheck {
    double sigma = 0.0;
    double u_sigma = 0.0;
    double lambda2_sigma = 0.0;
    std::optional<double> T_sigma_measured;  ///< empty = not attained within the run
    std::vector<double> min_density;         ///< per frame, min over {x > lambda2_sigma t}
};

/// Velocity on the wave curve at density sigma,
/// u_sigma = (2 sqrt(A gamma)/(gamma-1)) sigma^{(gamma-1)/2} + sigma2(rho_+, u_+).
inline double wave_curve_velocity(double sigma, const FarField& ff) {
    const double g = ff.gamma;
    return 2.0 * std::sqrt(ff.A * g) / (g - 1.0) * fast_pow(sigma, 0.5 * (g - 1.0)) +
           sigma2(ff.rho_plus, ff.u_plus, ff);
}

/// lambda2 at density sigma obtained by inverting the exact fan (bisection on
/// the monotone density profile); cross-checks the direct formula.
inline double lambda2_sigma_via_inversion(const FarField& ff, double sigma) {
    if (!(sigma > 0.0 && sigma <= ff.rho_plus))
        throw std::domain_error("lambda2_sigma_via_inversion: need 0 < sigma <= rho_plus");
    double lo = vacuum_edge_speed(ff);
    double hi = lambda2(ff.rho_plus, ff.u_plus, ff);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (exact_wave(mid, ff).rho < sigma) lo = mid; else hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

/// Scan a stored trajectory for the first time after which the density stays
/// above sigma/2 on the wedge {x > lambda2_sigma * t}.
inline RegionCheck region_check(std::span<const TrajectoryFrame> traj, const FarField& ff,
                                double sigma) {
    if (!(sigma > 0.0 && sigma <= ff.rho_plus))
        throw std::domain_error("region_check: need 0 < sigma <= rho_plus");
    RegionCheck rc;
    rc.sigma = sigma;
    rc.u_sigma = wave_curve_velocity(sigma, ff);
    rc.lambda2_sigma = lambda2(sigma, rc.u_sigma, ff);

    rc.min_density.reserve(traj.size());
    for (const auto& fr : traj) {
        double mn = std::numeric_limits<double>::infinity();
        const double xcut = rc.lambda2_sigma * fr.t;
        for (std::size_t i = 0; i < fr.rho.size(); ++i)
            if (fr.cell_center(i) > xcut) mn = std::min(mn, fr.rho[i]);
        rc.min_density.push_back(mn);
    }
    // earliest frame from which the bound persists to the end of the run
    const double bound = 0.5 * sigma;
    std::ptrdiff_t first_ok = -1;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(traj.size()) - 1; i >= 0; --i) {
        if (rc.min_density[static_cast<std::size_t>(i)] >= bound) first_ok = i;
        else break;
    }
    if (first_ok >= 0) rc.T_sigma_measured = traj[static_cast<std::size_t>(first_ok)].t;
    return rc;
}

/// Min density over the far vacuum side {x < u_- t - margin}; empty when the
/// wedge has left the computational domain.
inline std::optional<double> vacuum_side_min(const TrajectoryFrame& fr, const FarField& ff,
                                             double margin) {
    const double xcut = vacuum_edge_speed(ff) * fr.t - margin;
    double mn = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < fr.rho.size(); ++i) {
        if (fr.cell_center(i) < xcut) {
            mn = std::min(mn, fr.rho[i]);
            any = true;
        }
    }
    if (!any) return std::nullopt;
    return mn;
}

}  // namespace vacwave
