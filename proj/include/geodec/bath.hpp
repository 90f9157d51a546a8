#pragma once

#include "geodec/core.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace geodec {

/// Parameters of the exponential (Ornstein-Uhlenbeck) bath correlation
/// alpha(t,s) = (gamma*Gamma/2) exp(-gamma|t-s|) exp(-i omega0 (t-s)).
struct BathParams {
    double gamma = 1.0;   // inverse memory time
    double Gamma = 1.0;   // kernel strength
    double omega0 = 0.0;  // central frequency

    void validate() const {
        require_finite(gamma, "gamma");
        require_finite(Gamma, "Gamma");
        require_finite(omega0, "omega0");
        if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0 (approach the Markov limit with large finite gamma)");
        if (Gamma < 0.0) throw ConfigError("Gamma must be >= 0");
    }

    /// alpha(t,t) = gamma*Gamma/2, the stationary noise variance.
    double variance() const noexcept { return 0.5 * gamma * Gamma; }
    Complex decay_rate() const noexcept { return {gamma, omega0}; }
};

inline Complex kernel(const BathParams& p, double t, double s) {
    const double tau = t - s;
    return p.variance() * std::exp(-p.gamma * std::abs(tau)) * std::polar(1.0, -p.omega0 * tau);
}

/// A(t) = int_0^t alpha(t,s) ds in closed form.
inline Complex kernel_integral(const BathParams& p, double t) {
    if (t < 0.0) throw ConfigError("kernel_integral: t must be >= 0");
    const Complex kappa = p.decay_rate();
    return p.variance() * (1.0 - std::exp(-kappa * t)) / kappa;
}

/// int_0^t A(s) ds in closed form.
inline Complex kernel_double_integral(const BathParams& p, double t) {
    if (t < 0.0) throw ConfigError("kernel_double_integral: t must be >= 0");
    const Complex kappa = p.decay_rate();
    return p.variance() / kappa * (t - (1.0 - std::exp(-kappa * t)) / kappa);
}

// ---------------------------------------------------------------------------
// Counter-based seeding

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for trajectory `index` of an ensemble; depends only on the pair, never
/// on which thread draws it.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Standard circular complex Gaussian source: E|xi|^2 = 1, E[xi^2] = 0.
class CircularGaussian {
public:
    explicit CircularGaussian(std::uint64_t seed) : engine_(seed) {}

    Complex operator()() {
        // Box-Muller on raw engine output.
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double radius = std::sqrt(-std::log(u1));
        return std::polar(radius, kTwoPi * u2);
    }

private:
    double uniform_open() {
        // 53 random bits mapped to (0, 1).
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Noise paths

/// One realization of the colored noise z on the half-step grid of `grid`.
struct NoisePath {
    TimeGrid grid;
    std::vector<Complex> samples;  // z(t0 + j*dt/2), j = 0..2*n_steps
    std::uint64_t seed = 0;
    std::uint64_t trajectory_index = 0;

    Complex at_half(std::size_t j) const { return samples[j]; }
    /// z at full grid point k.
    Complex at(std::size_t k) const { return samples[2 * k]; }

    static NoisePath zero(const TimeGrid& grid) {
        return NoisePath{grid, std::vector<Complex>(grid.half_size(), Complex{}), 0, 0};
    }
};

/// Stationary complex OU path, exact in distribution at every half-step point.
inline NoisePath sample_noise_path(const BathParams& params, const TimeGrid& grid, std::uint64_t seed,
                                   std::uint64_t trajectory_index) {
    params.validate();
    grid.validate();
    NoisePath path{grid, std::vector<Complex>(grid.half_size(), Complex{}), seed, trajectory_index};
    if (params.Gamma == 0.0) return path;

    const double h = 0.5 * grid.dt;
    const Complex decay = std::exp(-params.decay_rate() * h);
    const double kick = std::sqrt(params.variance() * -std::expm1(-2.0 * params.gamma * h));

    CircularGaussian xi(stream_seed(seed, trajectory_index));
    Complex z = std::sqrt(params.variance()) * xi();
    path.samples[0] = z;
    for (std::size_t j = 1; j < path.samples.size(); ++j) {
        z = z * decay + kick * xi();
        path.samples[j] = z;
    }
    return path;
}

inline constexpr std::size_t kMaxDenseNoisePoints = 4096;

/// Independent sampler: colors white noise with a factorization of the full
/// covariance matrix Sigma_jk = alpha(t_j, t_k) on the half-step grid.
inline NoisePath exact_noise_oracle(const BathParams& params, const TimeGrid& grid, std::uint64_t seed,
                                    std::uint64_t trajectory_index = 0) {
    params.validate();
    grid.validate();
    const std::size_t n = grid.half_size();
    if (n > kMaxDenseNoisePoints) throw ConfigError("exact_noise_oracle: grid exceeds 4096 half-step points");

    NoisePath path{grid, std::vector<Complex>(n, Complex{}), seed, trajectory_index};
    if (params.Gamma == 0.0) return path;

    Eigen::MatrixXcd sigma(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                kernel(params, grid.half_time(j), grid.half_time(k));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sigma);
    if (eig.info() != Eigen::Success) throw IntegrationFailure("exact_noise_oracle: eigensolver failed", grid.t0);
    const Eigen::VectorXd& evals = eig.eigenvalues();
    if (evals.minCoeff() < -1e-10 * std::max(1.0, params.variance()))
        throw IntegrationFailure("exact_noise_oracle: covariance not positive semidefinite", grid.t0);

    CircularGaussian xi(stream_seed(seed ^ 0xA5A5A5A5A5A5A5A5ull, trajectory_index));
    Eigen::VectorXcd white(n);
    for (Eigen::Index i = 0; i < white.size(); ++i) white[i] = std::sqrt(std::max(evals[i], 0.0)) * xi();
    const Eigen::VectorXcd colored = eig.eigenvectors() * white;
    for (std::size_t j = 0; j < n; ++j) path.samples[j] = colored[static_cast<Eigen::Index>(j)];
    return path;
}

}  // namespace geodec
