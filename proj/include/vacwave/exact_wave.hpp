#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "vacwave/numeric.hpp"

namespace vacwave {

/// Right far-field state and gas constants of the isentropic system
/// with pressure p(rho) = A rho^gamma and viscosity mu(rho) = B rho^alpha.
/// The left far field is vacuum; the two are connected by a 2-rarefaction.
struct FarField {
    double rho_plus = 1.0;  ///< right density, > 0
    double u_plus   = 0.0;  ///< right velocity
    double gamma    = 2.0;  ///< adiabatic exponent, 1 < gamma <= 2
    double A        = 1.0;  ///< pressure constant, > 0
    double alpha    = 1.0;  ///< viscosity exponent, 1 <= alpha <= (gamma+1)/2
    double B        = 1.0;  ///< viscosity constant, > 0

    void validate() const {
        if (!(rho_plus > 0.0))
            throw std::invalid_argument("FarField: rho_plus must be positive");
        if (!(gamma > 1.0 && gamma <= 2.0))
            throw std::invalid_argument(
                "FarField: admissibility requires 1 < gamma <= 2 (got gamma=" +
                std::to_string(gamma) + ")");
        if (!(alpha >= 1.0 && alpha <= 0.5 * (gamma + 1.0)))
            throw std::invalid_argument(
                "FarField: admissibility requires 1 <= alpha <= (gamma+1)/2 (got alpha=" +
                std::to_string(alpha) + ", gamma=" + std::to_string(gamma) + ")");
        if (!(A > 0.0)) throw std::invalid_argument("FarField: A must be positive");
        if (!(B > 0.0)) throw std::invalid_argument("FarField: B must be positive");
    }
};

/// One point of the self-similar fan.  m = rho*u off vacuum and m = 0 on
/// vacuum; u is reported as the fan-edge limit on the vacuum side (the
/// velocity itself is undefined there).
struct FanState {
    double rho = 0.0;
    double u   = 0.0;
    double m   = 0.0;
};

inline double pressure(double rho, const FarField& ff) {
    if (rho < 0.0) throw std::domain_error("pressure: negative density");
    return ff.A * fast_pow(rho, ff.gamma);
}

/// p'(rho) = A gamma rho^(gamma-1)
inline double dpressure(double rho, const FarField& ff) {
    if (rho < 0.0) throw std::domain_error("dpressure: negative density");
    return ff.A * ff.gamma * fast_pow(rho, ff.gamma - 1.0);
}

inline double sound_speed(double rho, const FarField& ff) {
    return std::sqrt(dpressure(rho, ff));
}

/// Second characteristic speed u + sqrt(p'(rho)).
inline double lambda2(double rho, double u, const FarField& ff) {
    return u + sound_speed(rho, ff);
}

/// 2-Riemann invariant u - (2 sqrt(A gamma)/(gamma-1)) rho^((gamma-1)/2),
/// constant along 2-rarefaction curves.
inline double sigma2(double rho, double u, const FarField& ff) {
    if (rho < 0.0) throw std::domain_error("sigma2: negative density");
    const double g = ff.gamma;
    return u - 2.0 * std::sqrt(ff.A * g) / (g - 1.0) * fast_pow(rho, 0.5 * (g - 1.0));
}

/// Speed of the gas entering the vacuum region: the u_- with
/// sigma2(0, u_-) = sigma2(rho_+, u_+).  Also the left edge speed of the fan.
inline double vacuum_edge_speed(const FarField& ff) {
    return sigma2(ff.rho_plus, ff.u_plus, ff);
}

/// 2-rarefaction wave connecting vacuum (left) to (rho_+, u_+), evaluated at
/// the similarity coordinate xi = x/t.  The fan region solves
///   lambda2(rho, u) = xi,   sigma2(rho, u) = sigma2(rho_+, u_+)
/// in closed form: with s2 the invariant value and c the sound speed,
///   c = (gamma-1)(xi - s2)/(gamma+1),  u = xi - c,
///   rho = (c^2/(A gamma))^(1/(gamma-1)).
inline FanState exact_wave(double xi, const FarField& ff) {
    const double g = ff.gamma;
    const double s2 = sigma2(ff.rho_plus, ff.u_plus, ff);
    const double u_minus = s2;  // sigma2(0, u_-) = u_-
    const double lam_plus = lambda2(ff.rho_plus, ff.u_plus, ff);

    FanState st;
    if (xi <= u_minus) {
        st.rho = 0.0;
        st.u = u_minus;
        st.m = 0.0;
    } else if (xi >= lam_plus) {
        st.rho = ff.rho_plus;
        st.u = ff.u_plus;
        st.m = st.rho * st.u;
    } else {
        const double c = (g - 1.0) * (xi - s2) / (g + 1.0);
        st.rho = fast_pow(c * c / (ff.A * g), 1.0 / (g - 1.0));
        st.u = xi - c;
        st.m = st.rho * st.u;
    }
    return st;
}

/// State (nu, u(nu)) on the 2-rarefaction curve through (rho_+, u_+):
/// u(nu) = (2 sqrt(A gamma)/(gamma-1)) nu^((gamma-1)/2) + sigma2(rho_+, u_+).
/// Used to cut the wave off just above vacuum.
inline FanState cutoff_state(double nu, const FarField& ff) {
    if (!(nu > 0.0) || !(nu < ff.rho_plus))
        throw std::domain_error("cutoff_state: need 0 < nu < rho_plus");
    const double g = ff.gamma;
    const double u_nu = 2.0 * std::sqrt(ff.A * g) / (g - 1.0) * fast_pow(nu, 0.5 * (g - 1.0)) +
                        sigma2(ff.rho_plus, ff.u_plus, ff);
    return FanState{nu, u_nu, nu * u_nu};
}

}  // namespace vacwave
