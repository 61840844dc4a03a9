#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vacwave/exact_wave.hpp"
#include "vacwave/numeric.hpp"
#include "vacwave/quadrature.hpp"

namespace vacwave {

/// Smoothing parameters of the Burgers initial profile
///   w0(x) = (w+ + w-)/2 + ((w+ - w-)/2) K_q int_0^{eta x} (1+y^2)^{-q} dy
/// with K_q normalising the full half-line integral to 1.
struct WaveParams {
    double w_minus = 0.0;  ///< left speed, < w_plus
    double w_plus  = 0.0;  ///< right speed
    double eta     = 0.1;  ///< smoothing scale, > 0
    double q       = 2.0;  ///< tail exponent, >= 2
    double K_q     = 0.0;  ///< normalisation constant

    double delta_r() const { return w_plus - w_minus; }
};

namespace detail {

inline bool is_small_integer(double q, int& n) {
    const double r = std::round(q);
    if (std::fabs(q - r) < 1e-12 && r >= 1.0 && r <= 64.0) {
        n = static_cast<int>(r);
        return true;
    }
    return false;
}

/// int_0^z (1+y^2)^{-n} dy for integer n >= 1, by the standard reduction
/// I_1 = atan z,  I_{k+1} = z / (2k (1+z^2)^k) + (2k-1)/(2k) I_k.
inline double tail_integral_int(double z, int n) {
    double I = std::atan(z);
    double pw = 1.0 + z * z;  // (1+z^2)^k as k advances
    for (int k = 1; k < n; ++k) {
        I = z / (2.0 * k * pw) + (2.0 * k - 1.0) / (2.0 * k) * I;
        pw *= (1.0 + z * z);
    }
    return I;
}

/// int_0^z (1+y^2)^{-q} dy via theta = atan y, giving a smooth bounded
/// integrand cos^{2q-2} on [0, atan z].
inline double tail_integral_quad(double z, double q) {
    const double sgn = z < 0 ? -1.0 : 1.0;
    const double b = std::atan(std::fabs(z));
    const double v = integrate([q](double th) { return std::pow(std::cos(th), 2.0 * q - 2.0); },
                               0.0, b, 1e-14);
    return sgn * v;
}

inline double tail_integral(double z, double q) {
    int n;
    if (is_small_integer(q, n)) {
        return z < 0 ? -tail_integral_int(-z, n) : tail_integral_int(z, n);
    }
    return tail_integral_quad(z, q);
}

}  // namespace detail

/// K_q = 1 / int_0^inf (1+y^2)^{-q} dy.
inline double kq_constant(double q) {
    if (!(q >= 2.0)) throw std::domain_error("kq_constant: need q >= 2");
    int n;
    double full;
    if (detail::is_small_integer(q, n)) {
        // closed half-line value from the reduction with I_1(inf) = pi/2
        double I = std::asin(1.0);  // pi/2
        for (int k = 1; k < n; ++k) I *= (2.0 * k - 1.0) / (2.0 * k);
        full = I;
    } else {
        full = integrate([q](double th) { return std::pow(std::cos(th), 2.0 * q - 2.0); },
                         0.0, std::asin(1.0), 1e-14);
    }
    return 1.0 / full;
}

inline WaveParams make_wave_params(double w_minus, double w_plus, double eta, double q) {
    if (!(w_minus < w_plus)) throw std::invalid_argument("WaveParams: need w_minus < w_plus");
    if (!(eta > 0.0)) throw std::invalid_argument("WaveParams: need eta > 0");
    WaveParams wp{w_minus, w_plus, eta, q, kq_constant(q)};
    return wp;
}

/// Wave parameters wiring the Burgers ends to the Euler wave:
/// w+ = lambda2(rho_+, u_+) and w- = lambda2 of the left state, which is the
/// cut-off state at density nu (nu > 0) or the vacuum edge (nu = 0).
inline WaveParams wave_params_for(const FarField& ff, double nu, double eta = 0.1,
                                  double q = 2.0) {
    const double wp = lambda2(ff.rho_plus, ff.u_plus, ff);
    double wm;
    if (nu > 0.0) {
        const FanState c = cutoff_state(nu, ff);
        wm = lambda2(c.rho, c.u, ff);
    } else {
        wm = vacuum_edge_speed(ff);
    }
    return make_wave_params(wm, wp, eta, q);
}

inline double w0(double x, const WaveParams& wp) {
    return 0.5 * (wp.w_plus + wp.w_minus) +
           0.5 * wp.delta_r() * wp.K_q * detail::tail_integral(wp.eta * x, wp.q);
}

inline double w0_x(double x, const WaveParams& wp) {
    const double y = wp.eta * x;
    return 0.5 * wp.delta_r() * wp.K_q * wp.eta * fast_pow(1.0 + y * y, -wp.q);
}

inline double w0_xx(double x, const WaveParams& wp) {
    const double y = wp.eta * x;
    return 0.5 * wp.delta_r() * wp.K_q * wp.eta * wp.eta * (-2.0 * wp.q) * y *
           fast_pow(1.0 + y * y, -wp.q - 1.0);
}

struct BurgersPoint {
    double w  = 0.0;  ///< w(t, x)
    double x0 = 0.0;  ///< foot of the characteristic through (t, x)
    int iters = 0;
};

/// Solve x = x0 + w0(x0) t for the characteristic foot x0 (unique: the map is
/// strictly increasing for t >= 0).  Safeguarded Newton with a bisection
/// fallback inside an expanding bracket.
inline BurgersPoint burgers_solve(double t, double x, const WaveParams& wp,
                                  std::optional<double> x0_hint = std::nullopt) {
    if (!(t >= 0.0)) throw std::domain_error("burgers_solve: need t >= 0");
    const double ftol = 1e-12 * std::max(1.0, std::fabs(x));
    auto F = [&](double s) { return s + w0(s, wp) * t - x; };

    // bracket: characteristics travel with speeds in (w-, w+)
    double lo = x - wp.w_plus * t - 1.0;
    double hi = x - wp.w_minus * t + 1.0;
    double flo = F(lo), fhi = F(hi);
    for (int k = 0; k < 64 && flo > 0.0; ++k) { lo -= std::pow(2.0, k); flo = F(lo); }
    for (int k = 0; k < 64 && fhi < 0.0; ++k) { hi += std::pow(2.0, k); fhi = F(hi); }

    double s = x0_hint ? *x0_hint : x - 0.5 * (wp.w_plus + wp.w_minus) * t;
    if (s < lo || s > hi) s = 0.5 * (lo + hi);

    BurgersPoint out;
    for (int it = 0; it < 200; ++it) {
        const double f = F(s);
        out.iters = it + 1;
        if (std::fabs(f) < ftol) {
            out.x0 = s;
            out.w = w0(s, wp);
            return out;
        }
        if (f > 0.0) hi = s; else lo = s;
        const double d = 1.0 + t * w0_x(s, wp);  // >= 1
        double snew = s - f / d;
        if (!(snew > lo && snew < hi)) snew = 0.5 * (lo + hi);
        s = snew;
    }
    throw std::runtime_error("burgers_solve: no convergence in 200 iterations (bracket [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

struct BurgersDerivs {
    double w_x  = 0.0;
    double w_xx = 0.0;
};

/// Spatial derivatives of w(t, x) through the characteristic foot:
/// w_x = w0'/(1 + t w0'),  w_xx = w0''/(1 + t w0')^3.
inline BurgersDerivs burgers_derivatives(double t, double x0, const WaveParams& wp) {
    const double d = 1.0 + t * w0_x(x0, wp);
    return BurgersDerivs{w0_x(x0, wp) / d, w0_xx(x0, wp) / (d * d * d)};
}

/// Smooth approximate 2-rarefaction wave values and derivatives at (t, x).
struct SmoothWaveEval {
    double rho_bar   = 0.0;
    double u_bar     = 0.0;
    double rho_bar_x = 0.0;
    double u_bar_x   = 0.0;
    double u_bar_xx  = 0.0;
};

/// Invert lambda2 = w(1+t, x), sigma2 = sigma2(rho_+, u_+) exactly as in the
/// exact fan, with the similarity coordinate replaced by the smooth Burgers
/// solution; derivatives follow by the chain rule.  The time shift 1+t keeps
/// the construction regular at t = 0.
inline SmoothWaveEval smooth_wave(double t, double x, const FarField& ff, const WaveParams& wp,
                                  double* x0_cache = nullptr) {
    const double g = ff.gamma;
    const double s2 = sigma2(ff.rho_plus, ff.u_plus, ff);
    const double tau = 1.0 + t;
    std::optional<double> hint;
    if (x0_cache) hint = *x0_cache;
    const BurgersPoint bp = burgers_solve(tau, x, wp, hint);
    if (x0_cache) *x0_cache = bp.x0;
    const BurgersDerivs bd = burgers_derivatives(tau, bp.x0, wp);

    const double c = (g - 1.0) * (bp.w - s2) / (g + 1.0);
    SmoothWaveEval ev;
    ev.rho_bar = fast_pow(c * c / (ff.A * g), 1.0 / (g - 1.0));
    ev.u_bar = bp.w - c;
    ev.u_bar_x = 2.0 / (g + 1.0) * bd.w_x;
    ev.u_bar_xx = 2.0 / (g + 1.0) * bd.w_xx;
    ev.rho_bar_x = 2.0 * ev.rho_bar / ((g + 1.0) * c) * bd.w_x;
    return ev;
}

/// ||u_bar_x(t, .)||_{L^p(R)} computed in characteristic coordinates:
/// with tau = 1+t,  dx = (1 + tau w0') dx0 and u_bar_x = (2/(g+1)) w0'/(1+tau w0'),
/// so no root solves are needed.  p = infinity returns the max (attained at
/// x0 = 0 where w0' is largest).
inline double ux_lp_norm(double t, double p, const WaveParams& wp, const FarField& ff) {
    const double g = ff.gamma;
    const double tau = 1.0 + t;
    const double cfac = 2.0 / (g + 1.0);
    if (std::isinf(p)) {
        const double w0p = w0_x(0.0, wp);
        return cfac * w0p / (1.0 + tau * w0p);
    }
    // integrand decays like (eta x0)^{-2qp} once 1 >> tau w0'; cut where
    // w0'(x0) drops below 1e-300^(1/p)-ish using a generous fixed window
    const double X = std::max(1e6, 1e3 / wp.eta);
    auto f = [&](double x0) {
        const double wp0 = w0_x(x0, wp);
        const double den = 1.0 + tau * wp0;
        return std::pow(wp0 / den, p) * den;
    };
    const double v = integrate(f, -X, X, 1e-14);
    return cfac * std::pow(v, 1.0 / p);
}

/// max_x |u_bar_xx(t, .)| by scanning the characteristic coordinate.
inline double uxx_linf_norm(double t, const WaveParams& wp, const FarField& ff) {
    const double g = ff.gamma;
    const double tau = 1.0 + t;
    double best = 0.0;
    // |w0''| peaks at eta x0 = O(1); the 1/(1+tau w0')^3 factor shifts the
    // maximiser outward as tau grows, so scan a wide log grid both sides.
    for (double a : geomspace(1e-4 / wp.eta, 1e6 / wp.eta, 4000)) {
        for (double x0 : {a, -a}) {
            const double d = 1.0 + tau * w0_x(x0, wp);
            best = std::max(best, std::fabs(w0_xx(x0, wp)) / (d * d * d));
        }
    }
    return 2.0 / (g + 1.0) * best;
}

/// ||w(t,.) - w^r(./t)||_{L^p} distance to the self-similar Burgers fan;
/// reported as a diagnostic only.
inline double w_selfsim_lp_distance(double t, double p, const WaveParams& wp) {
    if (!(t > 0.0)) throw std::domain_error("w_selfsim_lp_distance: need t > 0");
    auto wr = [&](double xi) {
        if (xi <= wp.w_minus) return wp.w_minus;
        if (xi >= wp.w_plus) return wp.w_plus;
        return xi;
    };
    const double X = std::max({1e4, std::fabs(wp.w_minus) * t, std::fabs(wp.w_plus) * t}) * 2.0;
    double x0c = 0.0;
    auto f = [&](double x) {
        const BurgersPoint bp = burgers_solve(t, x, wp, x0c);
        x0c = bp.x0;
        const double d = std::fabs(bp.w - wr(x / t));
        return std::isinf(p) ? d : std::pow(d, p);
    };
    if (std::isinf(p)) {
        double best = 0.0;
        for (double x = -X; x <= X; x += X / 4000.0) best = std::max(best, f(x));
        return best;
    }
    const double v = integrate(f, -X, X, 1e-10);
    return std::pow(v, 1.0 / p);
}

struct DecayRates {
    double slope = 0.0;            ///< LSQ slope of log ||u_bar_x||_p vs log(1+t)
    double remark_integral = 0.0;  ///< int_0^{T_max} ||u_bar_xx||_inf dt
    std::vector<double> norms;     ///< per-sample ||u_bar_x||_p
};

/// Measure the decay exponent of ||u_bar_x||_{L^p} over t_list and the
/// time-integral of ||u_bar_xx||_inf up to max(t_list).
inline DecayRates decay_rates(const WaveParams& wp, const FarField& ff, double p,
                              const std::vector<double>& t_list) {
    if (t_list.size() < 4) throw std::invalid_argument("decay_rates: need >= 4 times");
    const double span = (1.0 + t_list.back()) / (1.0 + t_list.front());
    if (span < 99.0) throw std::invalid_argument("decay_rates: t_list must span >= 2 decades");

    DecayRates out;
    std::vector<double> lx, ly;
    for (double t : t_list) {
        const double n = ux_lp_norm(t, p, wp, ff);
        out.norms.push_back(n);
        lx.push_back(std::log(1.0 + t));
        ly.push_back(std::log(n));
    }
    out.slope = linear_fit(lx, ly).slope;

    // Riemann-sum estimate of the Remark-type integral on a log-spaced grid
    const double T = t_list.back();
    const auto ts = geomspace(1e-3, T, 200);
    double acc = 0.0, prev_t = 0.0, prev_v = uxx_linf_norm(0.0, wp, ff);
    for (double t : ts) {
        const double v = uxx_linf_norm(t, wp, ff);
        acc += 0.5 * (v + prev_v) * (t - prev_t);
        prev_t = t;
        prev_v = v;
    }
    out.remark_integral = acc;
    return out;
}

}  // namespace vacwave
