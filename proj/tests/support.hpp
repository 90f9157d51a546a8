#pragma once

#include "geodec/geodec.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace geodec::testing {

/// Running mean and standard error of complex samples; real and imaginary
/// parts tracked separately.
struct ComplexStats {
    double n = 0, sr = 0, si = 0, srr = 0, sii = 0;

    void add(Complex z) {
        n += 1;
        sr += z.real();
        si += z.imag();
        srr += z.real() * z.real();
        sii += z.imag() * z.imag();
    }
    Complex mean() const { return {sr / n, si / n}; }
    double se_re() const { return std::sqrt(std::max(0.0, (srr - sr * sr / n) / (n - 1)) / n); }
    double se_im() const { return std::sqrt(std::max(0.0, (sii - si * si / n) / (n - 1)) / n); }
};

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

/// Asymptotic two-sample KS critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
    return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline TimeGrid period_grid(double dt_fraction = 1e-3) { return TimeGrid::with_step(0.0, kTwoPi, dt_fraction * kTwoPi); }

inline double sup_distance(const std::vector<State>& a, const std::vector<State>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, (a[k] - b[k]).norm());
    return m;
}

inline double sup_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace geodec::testing
