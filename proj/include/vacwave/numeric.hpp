#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vacwave {

/// pow specialised for the half-integer exponents that dominate the hot
/// loops (gamma=2, alpha=1, theta=1/2 cases reduce to sqrt/multiply).
inline double fast_pow(double x, double e) {
    if (e == 1.0) return x;
    if (e == 2.0) return x * x;
    if (e == 0.5) return std::sqrt(x);
    if (e == 1.5) return x * std::sqrt(x);
    if (e == 0.0) return 1.0;
    if (e == 3.0) return x * x * x;
    if (e == -0.5) return 1.0 / std::sqrt(x);
    if (e == -1.0) return 1.0 / x;
    if (e == -2.0) return 1.0 / (x * x);
    if (e == -3.0) return 1.0 / (x * x * x);
    return std::pow(x, e);
}

inline bool approx_equal(double a, double b, double rtol, double atol = 0.0) {
    return std::fabs(a - b) <= atol + rtol * std::max(std::fabs(a), std::fabs(b));
}

struct LineFit {
    double slope  = 0.0;
    double intercept = 0.0;
};

/// Ordinary least-squares line through (x_i, y_i).
inline LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need >= 2 equal-length samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

/// Grid L1 norm: sum |v_i| dx.
inline double grid_l1(std::span<const double> v, double dx) {
    double s = 0;
    for (double a : v) s += std::fabs(a);
    return s * dx;
}

inline double grid_linf(std::span<const double> v) {
    double s = 0;
    for (double a : v) s = std::max(s, std::fabs(a));
    return s;
}

/// Discrete Lp norm with the dx weight; p = infinity gives the max norm.
inline double grid_lp(std::span<const double> v, double dx, double p) {
    if (std::isinf(p)) return grid_linf(v);
    double s = 0;
    for (double a : v) s += std::pow(std::fabs(a), p);
    return std::pow(s * dx, 1.0 / p);
}

/// Centered first derivative, one-sided at the ends.
inline std::vector<double> gradient(std::span<const double> v, double dx) {
    const std::size_t n = v.size();
    if (n < 2) throw std::invalid_argument("gradient: need >= 2 samples");
    std::vector<double> g(n);
    g[0] = (v[1] - v[0]) / dx;
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
    g[n - 1] = (v[n - 1] - v[n - 2]) / dx;
    return g;
}

/// Geometrically spaced samples in [a, b].
inline std::vector<double> geomspace(double a, double b, int n) {
    assert(a > 0 && b > a && n >= 2);
    std::vector<double> r(n);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) r[i] = std::exp(la + (lb - la) * i / (n - 1));
    return r;
}

}  // namespace vacwave
