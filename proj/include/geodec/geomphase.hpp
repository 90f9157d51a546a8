#pragma once

#include "geodec/dynamics.hpp"
#include "geodec/unwrap.hpp"

#include <limits>
#include <utility>

namespace geodec {

/// Complex total, dynamical and geometric phases along one grid.
struct PhaseSeries {
    TimeGrid grid;
    std::vector<Complex> beta_tot;
    std::vector<Complex> beta_dyn;
    std::vector<Complex> beta;
    double min_overlap_magnitude = 0.0;

    std::size_t size() const noexcept { return beta.size(); }
};

/// Incremental total phase -i log sqrt(<psi~(0)|psi(t)> / <psi~(t)|psi(0)>)
/// against fixed reference states. Keeps its branch state, so a long run may
/// be fed in consecutive pieces.
class TotalPhaseTracker {
public:
    TotalPhaseTracker(State reference, State reference_tilde, double max_step = kMaxBranchStep)
        : ref_(std::move(reference)), ref_tilde_(std::move(reference_tilde)), unwrap_(max_step) {}

    Complex push(const State& psi, const State& psi_tilde, double t) {
        const Complex forward = bracket(ref_tilde_, psi);
        const Complex backward = bracket(psi_tilde, ref_);
        const double smallest = std::min(std::abs(forward), std::abs(backward));
        min_overlap_ = std::min(min_overlap_, smallest);
        if (!(smallest >= kSingularityThreshold))
            throw PhaseSingularity("overlap with the initial state fell below 1e-10", t);
        const Complex ratio = forward / backward;
        return half_log_phase(unwrap_.push(ratio, t), ratio);
    }

    double min_overlap() const noexcept { return min_overlap_; }

private:
    State ref_;
    State ref_tilde_;
    PhaseUnwrapper unwrap_;
    double min_overlap_ = std::numeric_limits<double>::infinity();
};

inline std::vector<Complex> total_phase(const TrajectoryPair& pair, double* min_overlap = nullptr) {
    TotalPhaseTracker tracker(pair.psi[0], pair.psi_tilde[0]);
    std::vector<Complex> out(pair.size());
    for (std::size_t k = 0; k < pair.size(); ++k) out[k] = tracker.push(pair.psi[k], pair.psi_tilde[k], pair.grid.time(k));
    if (min_overlap) *min_overlap = tracker.min_overlap();
    return out;
}

/// beta_dyn(t) = -int_0^t <psi~|H(s)|psi> ds with the Schroedinger-form
/// generator H = H_eff + i z* L. The smooth H_eff part uses the corrected
/// trapezoid; the noise part integrates the piecewise-linear z* of the
/// propagator against <psi~|L|psi> interpolated linearly over each step.
inline std::vector<Complex> dynamical_phase(const TrajectoryPair& pair, const ModelSpec& model) {
    if (!(pair.grid == model.grid)) throw ConfigError("dynamical_phase: pair and model grids differ");
    const Operator L = model.coupling();
    const std::size_t n = pair.size();
    const double h = pair.grid.dt;
    std::vector<Complex> smooth(n), g(n);
    for (std::size_t k = 0; k < n; ++k) {
        smooth[k] = -bracket(pair.psi_tilde[k], model.effective_hamiltonian(2 * k) * pair.psi[k]);
        g[k] = bracket(pair.psi_tilde[k], L * pair.psi[k]);
    }
    std::vector<Complex> out = cumulative_corrected_trapezoid(smooth, h);
    const bool half = pair.zbar_half.size() == pair.grid.half_size();
    auto linear_product = [](Complex a0, Complex a1, Complex b0, Complex b1, double w) {
        return (w / 6.0) * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1);
    };
    CompensatedSum<Complex> noise;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        Complex step;
        if (half) {
            const Complex gm = 0.5 * (g[k] + g[k + 1]);
            const Complex* z = &pair.zbar_half[2 * k];
            step = linear_product(z[0], z[1], g[k], gm, 0.5 * h) + linear_product(z[1], z[2], gm, g[k + 1], 0.5 * h);
        } else {
            step = linear_product(pair.zbar[k], pair.zbar[k + 1], g[k], g[k + 1], h);
        }
        noise.add(-kI * step);
        out[k + 1] += noise.value();
    }
    return out;
}

inline PhaseSeries geometric_phase(const TrajectoryPair& pair, const ModelSpec& model) {
    PhaseSeries out;
    out.grid = pair.grid;
    out.beta_tot = total_phase(pair, &out.min_overlap_magnitude);
    out.beta_dyn = dynamical_phase(pair, model);
    out.beta.resize(pair.size());
    for (std::size_t k = 0; k < pair.size(); ++k) out.beta[k] = out.beta_tot[k] - out.beta_dyn[k];
    return out;
}

namespace detail {

/// Fourth-order finite-difference derivative of a sampled vector curve:
/// five-point central stencil in the interior, one-sided stencils at the ends.
inline std::vector<State> differentiate(const std::vector<State>& f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw ConfigError("differentiate: need at least five samples");
    std::vector<State> d(n);
    const double s = 12.0 * h;
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / s;
    for (std::size_t k = 2; k + 2 < n; ++k) d[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / s;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / s;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / s;
    return d;
}

}  // namespace detail

/// Geometric phase as the integral of the connection one-form
/// beta = i int <chi~|d chi/ds> ds over the reference sections
/// chi = exp(-i phi) psi, <chi~| = <psi~| exp(i phi), phi the total phase.
/// Derivatives by finite differences, integral by corrected trapezoid.
inline std::vector<Complex> one_form_phase(const TrajectoryPair& pair) {
    const std::vector<Complex> phi = total_phase(pair);
    const std::size_t n = pair.size();
    std::vector<State> chi(n), chi_tilde(n);
    for (std::size_t k = 0; k < n; ++k) {
        chi[k] = std::exp(-kI * phi[k]) * pair.psi[k];
        chi_tilde[k] = std::exp(-kI * std::conj(phi[k])) * pair.psi_tilde[k];
    }
    const std::vector<State> dchi = detail::differentiate(chi, pair.grid.dt);
    std::vector<Complex> integrand(n);
    for (std::size_t k = 0; k < n; ++k) integrand[k] = kI * bracket(chi_tilde[k], dchi[k]);
    return cumulative_corrected_trapezoid(integrand, pair.grid.dt);
}

/// A sampled path of (state, adjoint) pairs with <phi~|phi> = 1.
struct StatePath {
    std::vector<State> phi;
    std::vector<State> phi_tilde;
};

/// Residual of the geodesic equation D_s^2 |phi> = 0, D_s = d/ds - A_s,
/// A_s = <phi~|d phi/ds>, at each interior sample. Only the component
/// transverse to |phi> is constrained by the variational problem (the
/// normalization fixes the rest), so the residual is projected with
/// 1 - |phi><phi~|.
inline std::vector<double> geodesic_residual(const StatePath& path, const TimeGrid& grid) {
    const std::size_t n = path.phi.size();
    if (n < 5 || path.phi_tilde.size() != n) throw ConfigError("geodesic_residual: need at least 5 matching samples");
    if (grid.size() != n) throw ConfigError("geodesic_residual: grid size does not match path");
    const double h = grid.dt;

    const std::vector<State> d1 = detail::differentiate(path.phi, h);
    std::vector<Complex> connection(n);
    for (std::size_t k = 0; k < n; ++k) connection[k] = bracket(path.phi_tilde[k], d1[k]);

    std::vector<double> residual;
    residual.reserve(n - 2);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const State d2 = (path.phi[k + 1] - 2.0 * path.phi[k] + path.phi[k - 1]) / (h * h);
        const Complex dA = (connection[k + 1] - connection[k - 1]) / (2.0 * h);
        const Complex A = connection[k];
        State r = d2 - dA * path.phi[k] - A * d1[k] + A * A * path.phi[k];
        r -= bracket(path.phi_tilde[k], r) * path.phi[k];
        residual.push_back(r.norm());
    }
    return residual;
}

}  // namespace geodec
