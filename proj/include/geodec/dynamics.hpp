#pragma once

#include "geodec/models.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace geodec {

/// A stochastic trajectory |psi(t)> and its adjoint |psi~(t)> on one grid.
/// Both are stored unnormalized.
struct TrajectoryPair {
    TimeGrid grid;
    std::vector<State> psi;
    std::vector<State> psi_tilde;
    std::vector<Complex> overlap;  // <psi~(t)|psi(t)>
    std::vector<Complex> zbar;       // z*(t_k)
    std::vector<Complex> zbar_half;  // z* on the half-step points, the interpolation nodes of the propagator

    std::size_t size() const noexcept { return psi.size(); }
};

inline constexpr double kDefaultNormTolerance = 1e-8;
inline constexpr double kStateBlowUp = 1e150;

namespace detail {

inline void check_step(const TrajectoryPair& pair, std::size_t k, double tolerance) {
    const double t = pair.grid.time(k);
    if (!all_finite(pair.psi[k]) || !all_finite(pair.psi_tilde[k]) || pair.psi[k].norm() > kStateBlowUp ||
        pair.psi_tilde[k].norm() > kStateBlowUp)
        throw BlowUp("trajectory pair diverged (step " + std::to_string(k) + ")", t);
    if (std::abs(pair.overlap[k] - 1.0) > tolerance)
        throw IntegrationFailure("biorthogonal overlap drifted by " + std::to_string(std::abs(pair.overlap[k] - 1.0)) +
                                     " at step " + std::to_string(k) + "; reduce dt",
                                 t);
}

inline TrajectoryPair make_pair(const TimeGrid& grid, const State& psi0) {
    TrajectoryPair pair;
    pair.grid = grid;
    pair.psi.resize(grid.size());
    pair.psi_tilde.resize(grid.size());
    pair.overlap.resize(grid.size());
    pair.zbar.resize(grid.size());
    pair.zbar_half.resize(grid.half_size());
    pair.psi[0] = psi0;
    pair.psi_tilde[0] = psi0;
    pair.overlap[0] = bracket(psi0, psi0);
    return pair;
}

}  // namespace detail

/// Propagate the pair under
///   d|psi>/dt  = [-i H_s + L z* - L^dagger O(t)] |psi>,
///   d|psi~>/dt = -i [H_s - i L^dagger z + i O^dagger L] |psi~>.
///
/// Each step applies exp(Omega) to psi and exp(-Omega^dagger) to psi~, with
/// Omega the fourth-order Magnus exponent built from the three half-step
/// nodes of the step. The biorthogonal overlap is therefore conserved up to
/// round-off whatever the noise roughness. The noise is the piecewise-linear
/// interpolant of its half-step samples and its first-order integral is exact.
inline TrajectoryPair propagate_pair(const ModelSpec& model, const NoisePath& noise,
                                     double norm_tolerance = kDefaultNormTolerance) {
    const TimeGrid& grid = model.grid;
    if (!(noise.grid == grid) || noise.samples.size() != grid.half_size())
        throw ConfigError("propagate_pair: noise path grid does not match the model grid");
    if (model.obar_coeffs.empty()) throw ConfigError("propagate_pair: model O-bar coefficients not populated");

    TrajectoryPair pair = detail::make_pair(grid, model.initial_state());
    const Operator L = model.coupling();
    const double h = grid.dt;

    auto node = [&](std::size_t j) -> Operator { return -kI * model.effective_hamiltonian(j) + L * std::conj(noise.at_half(j)); };

    for (std::size_t j = 0; j < grid.half_size(); ++j) pair.zbar_half[j] = std::conj(noise.at_half(j));
    pair.zbar[0] = std::conj(noise.at(0));
    Operator a_left = node(0);
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const std::size_t j = 2 * k;
        const Operator a_mid = node(j + 1);
        const Operator a_right = node(j + 2);
        const Complex noise_integral =
            (h / 4.0) * (std::conj(noise.at_half(j)) + 2.0 * std::conj(noise.at_half(j + 1)) + std::conj(noise.at_half(j + 2)));

        const Operator h_simpson = model.effective_hamiltonian(j) + 4.0 * model.effective_hamiltonian(j + 1) +
                                   model.effective_hamiltonian(j + 2);
        Operator omega = (-kI * h / 6.0) * h_simpson + noise_integral * L;
        omega += (h * h / 12.0) * (a_right * a_left - a_left * a_right);

        const Operator forward = omega.exp();
        const Operator backward = (-omega).exp();
        pair.psi[k + 1] = forward * pair.psi[k];
        pair.psi_tilde[k + 1] = backward.adjoint() * pair.psi_tilde[k];
        pair.overlap[k + 1] = bracket(pair.psi_tilde[k + 1], pair.psi[k + 1]);
        pair.zbar[k + 1] = std::conj(noise.at(k + 1));
        detail::check_step(pair, k + 1, norm_tolerance);
        a_left = a_right;
    }
    return pair;
}

/// The pair driven by the zero noise realization. Every per-trajectory phase
/// is an analytic functional of z* alone, and the circular Gaussian average of
/// such a functional equals its value at z* = 0, so this pair carries the
/// ensemble-mean phases.
inline TrajectoryPair propagate_mean_pair(const ModelSpec& model, double norm_tolerance = kDefaultNormTolerance) {
    return propagate_pair(model, NoisePath::zero(model.grid), norm_tolerance);
}

/// Closed-form trajectory pair of the pure-dephasing model. The generator is
/// diagonal, so each amplitude is an exponential of time integrals; the noise
/// integral uses the trapezoid rule on the half-step grid and int A uses its
/// closed form.
inline TrajectoryPair analytic_dephasing_pair(const ModelSpec& model, const NoisePath& noise) {
    if (model.kind != ModelKind::Dephasing2L) throw ConfigError("analytic_dephasing_pair: model must be dephasing");
    const TimeGrid& grid = model.grid;
    if (!(noise.grid == grid)) throw ConfigError("analytic_dephasing_pair: noise path grid does not match the model grid");

    const State psi0 = model.initial_state();
    TrajectoryPair pair = detail::make_pair(grid, psi0);
    const double lambda = model.lambda;
    const double h = 0.5 * grid.dt;

    CompensatedSum<Complex> zbar_integral;
    for (std::size_t j = 0; j < grid.half_size(); ++j) pair.zbar_half[j] = std::conj(noise.at_half(j));
    pair.zbar[0] = std::conj(noise.at(0));
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const std::size_t j = 2 * k;
        zbar_integral.add(0.5 * h * (std::conj(noise.at_half(j - 2)) + std::conj(noise.at_half(j - 1))));
        zbar_integral.add(0.5 * h * (std::conj(noise.at_half(j - 1)) + std::conj(noise.at_half(j))));
        const Complex zi = zbar_integral.value();
        const double t = grid.time(k) - grid.t0;
        const Complex ia = lambda * lambda * kernel_double_integral(model.bath, t);
        const Complex phase = -kI * 0.5 * model.omega * t;

        State psi(2), tilde(2);
        psi[0] = psi0[0] * std::exp(phase + lambda * zi - ia);
        psi[1] = psi0[1] * std::exp(-phase - lambda * zi - ia);
        tilde[0] = psi0[0] * std::exp(phase - lambda * std::conj(zi) + std::conj(ia));
        tilde[1] = psi0[1] * std::exp(-phase + lambda * std::conj(zi) + std::conj(ia));
        pair.psi[k] = psi;
        pair.psi_tilde[k] = tilde;
        pair.overlap[k] = bracket(tilde, psi);
        pair.zbar[k] = std::conj(noise.at(k));
    }
    return pair;
}

}  // namespace geodec
