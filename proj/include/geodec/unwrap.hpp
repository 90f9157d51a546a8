#pragma once

#include "geodec/core.hpp"

namespace geodec {

/// Consecutive samples are joined through the nearer branch; a wrapped step
/// of this size or more is ambiguous.
inline constexpr double kMaxBranchStep = kPi;

/// Smallest overlap magnitude for which a phase is defined.
inline constexpr double kSingularityThreshold = 1e-10;

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    return a;
}

/// Continuous argument of a sampled complex curve, starting from 0.
/// Carries its branch state so a series can be processed in pieces.
class PhaseUnwrapper {
public:
    explicit PhaseUnwrapper(double max_step = kMaxBranchStep) : max_step_(max_step) {}

    double push(Complex w, double t = 0.0) {
        const double a = std::arg(w);
        const double delta = wrap_angle(a - last_);
        if (std::abs(delta) >= max_step_) throw BranchJump("argument jumped by " + std::to_string(delta) + " in one step", t);
        last_ = a;
        total_ += delta;
        return total_;
    }

    double value() const noexcept { return total_; }

private:
    double max_step_;
    double last_ = 0.0;
    double total_ = 0.0;
};

/// -i log sqrt(w) on the continued branch: half the unwrapped argument minus
/// i/2 log|w|.
inline Complex half_log_phase(double unwrapped_arg, Complex w) {
    return {0.5 * unwrapped_arg, -0.5 * std::log(std::abs(w))};
}

/// Unwrap a whole series of complex values and return -i log sqrt(w_k).
inline std::vector<Complex> unwrapped_half_log(const std::vector<Complex>& w, const std::vector<double>* times = nullptr) {
    PhaseUnwrapper unwrap;
    std::vector<Complex> out(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (std::abs(w[k]) < kSingularityThreshold)
            throw PhaseSingularity("log argument below threshold", times ? (*times)[k] : static_cast<double>(k));
        out[k] = half_log_phase(unwrap.push(w[k], times ? (*times)[k] : 0.0), w[k]);
    }
    return out;
}

/// Continuous argument, from u = 0, of cos(u) - i c sin(u). For c != 0 the
/// curve never touches the origin; c == 0 takes the principal value at the
/// nodes.
inline double closed_system_arg(double c, double u) {
    const double turns = std::round(u / kPi);
    if (c == 0.0) {
        const double principal = std::cos(u) >= 0.0 ? 0.0 : kPi;
        return principal;
    }
    const double reduced = u - turns * kPi;  // in [-pi/2, pi/2]
    const double base = std::atan(std::abs(c) * std::tan(reduced));
    const double lifted = base + turns * kPi;
    return c > 0.0 ? -lifted : lifted;
}

/// Distance between two complex phases with the real parts compared modulo
/// pi: -i log sqrt(w) fixes its real part only up to the sign of the root.
inline double phase_distance(Complex a, Complex b) {
    const double d = std::remainder(a.real() - b.real(), kPi);
    return std::abs(Complex{d, a.imag() - b.imag()});
}

}  // namespace geodec
