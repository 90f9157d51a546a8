#pragma once

#include "geodec/ensemble.hpp"

namespace geodec {

/// Total phase of the three-level model. The first two components of psi and
/// every component of psi~ are noise-independent, so the zero-noise pair gives
/// the phase of every trajectory.
inline std::vector<Complex> leo_total_phase(const ModelSpec& model) {
    if (model.kind != ModelKind::Leo3L) throw ConfigError("leo_total_phase: model must be leo");
    return total_phase(propagate_mean_pair(model));
}

/// Ensemble-averaged dynamical phase -int_0^t tr[(H_s - i L^dagger O) rho~] ds.
inline std::vector<Complex> leo_dyn_phase(const ModelSpec& model, const DensitySeries& rho_tilde) {
    if (model.kind != ModelKind::Leo3L) throw ConfigError("leo_dyn_phase: model must be leo");
    if (!(rho_tilde.grid == model.grid)) throw ConfigError("leo_dyn_phase: rho~ grid differs from model grid");
    std::vector<Complex> integrand(model.grid.size());
    for (std::size_t k = 0; k < integrand.size(); ++k)
        integrand[k] = -(model.effective_hamiltonian(2 * k) * rho_tilde.rho[k]).trace();
    return cumulative_corrected_trapezoid(integrand, model.grid.dt);
}

inline std::vector<Complex> leo_dyn_phase(const ModelSpec& model) { return leo_dyn_phase(model, evolve_rho_tilde(model)); }

inline PhaseSeries leo_phase_series(const ModelSpec& model) {
    PhaseSeries out;
    out.grid = model.grid;
    const TrajectoryPair pair = propagate_mean_pair(model);
    out.beta_tot = total_phase(pair, &out.min_overlap_magnitude);
    out.beta_dyn = leo_dyn_phase(model);
    out.beta.resize(out.beta_tot.size());
    for (std::size_t k = 0; k < out.beta.size(); ++k) out.beta[k] = out.beta_tot[k] - out.beta_dyn[k];
    return out;
}

inline double sup_abs_imag(const std::vector<Complex>& series) {
    double m = 0.0;
    for (const Complex& v : series) m = std::max(m, std::abs(v.imag()));
    return m;
}

/// Target (closed, uncontrolled), uncontrolled and controlled runs of the
/// three-level model on a shared grid.
struct LeoExperiment {
    ModelSpec model;
    ModelSpec uncontrolled_model;
    ModelSpec target_model;
    PhaseSeries target;
    PhaseSeries uncontrolled;
    PhaseSeries controlled;
    double sup_im_controlled = 0.0;
    double sup_im_uncontrolled = 0.0;
    double max_re_deviation = 0.0;  // sup_t |Re beta_controlled - Re beta_target|
};

/// Step used for the control experiment when none is given: 20000 steps per
/// system period, enough to resolve Omega_c = 50.
inline double default_leo_dt(double omega) { return kTwoPi / (omega * 20000.0); }

inline LeoExperiment run_leo_experiment(double omega, double lambda, const BathParams& bath, double theta,
                                        const ControlField& control, const TimeGrid& grid) {
    LeoExperiment e;
    e.model = build_model(ModelKind::Leo3L, omega, lambda, bath, theta, control, grid);
    e.uncontrolled_model = build_model(ModelKind::Leo3L, omega, lambda, bath, theta, ControlField{0.0, control.Omega_c}, grid);
    e.target_model = build_model(ModelKind::Leo3L, omega, 0.0, bath, theta, ControlField{0.0, 0.0}, grid);
    e.target = leo_phase_series(e.target_model);
    e.uncontrolled = leo_phase_series(e.uncontrolled_model);
    e.controlled = leo_phase_series(e.model);
    e.sup_im_controlled = sup_abs_imag(e.controlled.beta);
    e.sup_im_uncontrolled = sup_abs_imag(e.uncontrolled.beta);
    for (std::size_t k = 0; k < e.controlled.beta.size(); ++k)
        e.max_re_deviation = std::max(e.max_re_deviation, std::abs(e.controlled.beta[k].real() - e.target.beta[k].real()));
    return e;
}

}  // namespace geodec
