#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace geodec {

using Complex = std::complex<double>;

// States and operators never exceed three levels; fixed max size keeps them
// off the heap in the hot loops.
using State = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 3, 1>;
using Operator = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure of an integrator or solver (CLI exit code 3).
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time)), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class IntegrationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BlowUp : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An overlap entering a phase fell below the singularity threshold.
class PhaseSingularity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The wrapped argument moved too far in one step to unwrap unambiguously.
class BranchJump : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ExcessiveExclusions : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Time grid

/// Uniform grid t_k = t0 + k*dt, k = 0..n_steps. Integrator stages use the
/// half-step points t0 + j*dt/2, j = 0..2*n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1e-3;
    std::size_t n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, std::size_t n_steps_) : t0(t0_), dt(dt_), n_steps(n_steps_) {
        validate();
    }

    /// Grid with n_steps of equal size covering [t0, t_final].
    static TimeGrid covering(double t0, double t_final, std::size_t n_steps) {
        if (!(t_final > t0)) throw ConfigError("time grid: t_final must exceed t0");
        return TimeGrid(t0, (t_final - t0) / static_cast<double>(n_steps), n_steps);
    }

    /// Grid with step close to dt_target, adjusted so t_final is hit exactly.
    static TimeGrid with_step(double t0, double t_final, double dt_target) {
        if (!(dt_target > 0.0) || !std::isfinite(dt_target)) throw ConfigError("time grid: dt must be positive");
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round((t_final - t0) / dt_target)));
        return covering(t0, t_final, n);
    }

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0)) throw ConfigError("time grid: dt must be positive and finite");
        if (n_steps < 1) throw ConfigError("time grid: n_steps must be >= 1");
    }

    std::size_t size() const noexcept { return n_steps + 1; }
    std::size_t half_size() const noexcept { return 2 * n_steps + 1; }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
    double half_time(std::size_t j) const noexcept { return t0 + static_cast<double>(j) * (0.5 * dt); }
    double t_final() const noexcept { return time(n_steps); }

    bool operator==(const TimeGrid&) const = default;
};

// ---------------------------------------------------------------------------
// Small numerical helpers

/// Neumaier-compensated running sum. Fixed-order folds with this give the
/// same bits regardless of how the work was partitioned.
template <typename T>
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <>
class CompensatedSum<Complex> {
public:
    void add(Complex x) {
        re_.add(x.real());
        im_.add(x.imag());
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum<double> re_;
    CompensatedSum<double> im_;
};

/// Cumulative trapezoid integral of samples with spacing h; out[0] = 0.
inline std::vector<Complex> cumulative_trapezoid(const std::vector<Complex>& f, double h) {
    std::vector<Complex> out(f.size(), Complex{});
    CompensatedSum<Complex> acc;
    for (std::size_t k = 1; k < f.size(); ++k) {
        acc.add(0.5 * h * (f[k - 1] + f[k]));
        out[k] = acc.value();
    }
    return out;
}

/// Cumulative trapezoid with the endpoint-derivative (Gregory) correction,
/// fourth order for smooth samples; derivatives by second-order differences.
inline std::vector<Complex> cumulative_corrected_trapezoid(const std::vector<Complex>& f, double h) {
    std::vector<Complex> out = cumulative_trapezoid(f, h);
    const std::size_t n = f.size();
    if (n < 3) return out;
    auto slope = [&](std::size_t k) {
        if (k == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        if (k + 1 == n) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        return (f[k + 1] - f[k - 1]) / (2.0 * h);
    };
    const Complex d0 = slope(0);
    for (std::size_t k = 1; k < n; ++k) out[k] -= (h * h / 12.0) * (slope(k) - d0);
    return out;
}

/// Biorthogonal inner product <a~|b> (conjugates the left argument).
inline Complex bracket(const State& left, const State& right) { return left.dot(right); }

inline bool all_finite(const State& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    return true;
}

inline void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw ConfigError(std::string(name) + " must be finite");
}

}  // namespace geodec
