#pragma once

#include "geodec/models.hpp"
#include "geodec/unwrap.hpp"

#include <map>

namespace geodec {

enum class FormulaId {
    DissipativeAvgTotal,
    DissipativeAvgDyn,
    Markov,
    LambdaExpansion,
    GammaExpansionLeading,
    DephasingAvg,
    ClosedSystem,
};

inline std::string_view to_string(FormulaId id) {
    switch (id) {
        case FormulaId::DissipativeAvgTotal: return "dissipative_avg_total_phase";
        case FormulaId::DissipativeAvgDyn: return "dissipative_avg_dyn_phase";
        case FormulaId::Markov: return "markov_phase";
        case FormulaId::LambdaExpansion: return "lambda_expansion_phase";
        case FormulaId::GammaExpansionLeading: return "gamma_expansion_leading";
        case FormulaId::DephasingAvg: return "dephasing_avg_phases";
        case FormulaId::ClosedSystem: return "closed_system_phase";
    }
    return "?";
}

struct ClosedFormResult {
    Complex value;
    FormulaId formula;
    std::map<std::string, double> inputs;
};

inline constexpr double kLogArgumentFloor = 1e-12;

/// Closed-system geometric phase (omega t / 2) cos(theta) + arg(cos(omega t/2) - i cos(theta) sin(omega t/2)),
/// with the argument continued from t = 0.
inline ClosedFormResult closed_system_phase(double omega, double theta, double t) {
    const double c = std::cos(theta);
    const double u = 0.5 * omega * t;
    return {Complex{u * c + closed_system_arg(c, u), 0.0}, FormulaId::ClosedSystem,
            {{"omega", omega}, {"theta", theta}, {"t", t}}};
}

struct DephasingPhases {
    Complex beta_tot;
    Complex beta_dyn;
    Complex beta;
};

/// Ensemble-averaged phases of the pure-dephasing model.
inline DephasingPhases dephasing_avg_phases(double omega, double lambda, const BathParams& bath, double theta, double t) {
    if (t < 0.0) throw ConfigError("dephasing_avg_phases: t must be >= 0");
    const double c = std::cos(theta);
    const double u = 0.5 * omega * t;
    const Complex memory = kI * lambda * lambda * kernel_double_integral(bath, t);
    const double arg = closed_system_arg(c, u);
    DephasingPhases out;
    out.beta_tot = memory + arg;
    out.beta_dyn = memory - u * c;
    out.beta = out.beta_tot - out.beta_dyn;
    return out;
}

/// Running integral of a half-step coefficient series on the full grid
/// (Simpson's rule over each step).
inline std::vector<Complex> integrate_half_series(const CoefficientSeries& f, const TimeGrid& grid) {
    if (f.size() != grid.half_size()) throw ConfigError("integrate_half_series: series does not match grid");
    std::vector<Complex> out(grid.size());
    CompensatedSum<Complex> acc;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const std::size_t j = 2 * k;
        acc.add((grid.dt / 6.0) * (f[j] + 4.0 * f[j + 1] + f[j + 2]));
        out[k + 1] = acc.value();
    }
    return out;
}

/// Averaged total phase of the dissipative model,
/// -(i/2) log[g (g (c+1) - (c-1) e^{i w t}) / (-g (c-1) + (c+1) e^{i w t})], g = exp(-lambda int F),
/// on every grid point, the log continued from t = 0. F is given on the half-step grid.
inline std::vector<Complex> dissipative_avg_total_phase_series(double omega, double lambda, double theta, const TimeGrid& grid,
                                                               const CoefficientSeries& F) {
    const double c = std::cos(theta);
    const std::vector<Complex> intF = integrate_half_series(F, grid);
    PhaseUnwrapper unwrap;
    std::vector<Complex> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.time(k) - grid.t0;
        const Complex g = std::exp(-lambda * intF[k]);
        const Complex e = std::exp(kI * omega * t);
        const Complex num = g * (g * (c + 1.0) - (c - 1.0) * e);
        const Complex den = -g * (c - 1.0) + (c + 1.0) * e;
        if (std::abs(num) < kLogArgumentFloor || std::abs(den) < kLogArgumentFloor)
            throw PhaseSingularity("dissipative_avg_total_phase: log argument vanishes", grid.time(k));
        const Complex w = num / den;
        out[k] = half_log_phase(unwrap.push(w, grid.time(k)), w);
    }
    return out;
}

/// Averaged dynamical phase of the dissipative model,
/// -int_0^t [(omega/2) cos(theta) - (i lambda F(s)/2)(cos(theta) + 1)] ds, with int F by Simpson's rule on the
/// half-step grid (the same integral as in the total phase).
inline std::vector<Complex> dissipative_avg_dyn_phase_series(double omega, double lambda, double theta, const TimeGrid& grid,
                                                             const CoefficientSeries& F) {
    if (F.size() != grid.half_size()) throw ConfigError("dissipative_avg_dyn_phase: series does not match grid");
    const double c = std::cos(theta);
    const std::vector<Complex> intF = integrate_half_series(F, grid);
    std::vector<Complex> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        out[k] = -0.5 * omega * c * (grid.time(k) - grid.t0) + 0.5 * kI * lambda * (c + 1.0) * intF[k];
    return out;
}

/// Final-time value of the averaged dissipative total phase on [0, t], with F
/// solved on a grid of step close to dt.
inline ClosedFormResult dissipative_avg_total_phase(double omega, double lambda, const BathParams& bath, double theta, double t,
                                                    double dt = 1e-3) {
    const TimeGrid grid = TimeGrid::with_step(0.0, t, dt);
    const auto F = solve_dissipative_F(omega, lambda, bath, grid);
    return {dissipative_avg_total_phase_series(omega, lambda, theta, grid, F).back(), FormulaId::DissipativeAvgTotal,
            {{"omega", omega}, {"lambda", lambda}, {"gamma", bath.gamma}, {"Gamma", bath.Gamma}, {"omega0", bath.omega0},
             {"theta", theta}, {"t", t}, {"dt", grid.dt}}};
}

inline ClosedFormResult dissipative_avg_dyn_phase(double omega, double lambda, const BathParams& bath, double theta, double t,
                                                  double dt = 1e-3) {
    const TimeGrid grid = TimeGrid::with_step(0.0, t, dt);
    const auto F = solve_dissipative_F(omega, lambda, bath, grid);
    return {dissipative_avg_dyn_phase_series(omega, lambda, theta, grid, F).back(), FormulaId::DissipativeAvgDyn,
            {{"omega", omega}, {"lambda", lambda}, {"gamma", bath.gamma}, {"Gamma", bath.Gamma}, {"omega0", bath.omega0},
             {"theta", theta}, {"t", t}, {"dt", grid.dt}}};
}

/// Markov-limit geometric phase of the dissipative model at t = 2 pi / omega:
/// pi - (i/2)[-2 atanh(cos(theta) tanh(pi lambda^2 / 2)) + pi cos(theta)(lambda^2 + 2i)].
inline ClosedFormResult markov_phase(double lambda, double theta) {
    const double c = std::cos(theta);
    const double x = c * std::tanh(0.5 * kPi * lambda * lambda);
    if (!(std::abs(x) < 1.0)) throw ConfigError("markov_phase: |cos(theta) tanh(pi lambda^2/2)| must be < 1");
    const double atanh_x = 0.5 * std::log((1.0 + x) / (1.0 - x));
    const Complex bracket_term = -2.0 * atanh_x + kPi * c * (lambda * lambda + 2.0 * kI);
    return {kPi - 0.5 * kI * bracket_term, FormulaId::Markov, {{"lambda", lambda}, {"theta", theta}}};
}

/// Geometric phase of the dissipative model to O(lambda^2), omega = 1, omega0 = 0.
inline ClosedFormResult lambda_expansion_phase(double gamma, double theta, double t, double lambda) {
    const double c = std::cos(theta);
    const double s2 = std::pow(std::sin(0.5 * theta), 2);
    const double den_real = c * c * std::pow(std::sin(0.5 * t), 2) + std::pow(std::cos(0.5 * t), 2);
    if (den_real < kLogArgumentFloor) throw ConfigError("lambda_expansion_phase: vanishing denominator");
    const Complex g{gamma, -1.0};  // gamma - i
    const Complex e1 = std::exp(kI * t) - 1.0;
    const Complex prefactor = kI * gamma * e1 * e1 * s2 * c * (c + 1.0) * std::exp(-gamma * t) / (8.0 * g * g * den_real);
    const Complex tail = 1.0 + std::exp(g * t) * (g * t - 1.0);
    const Complex value = closed_system_phase(1.0, theta, t).value - prefactor * tail * lambda * lambda;
    return {value, FormulaId::LambdaExpansion, {{"gamma", gamma}, {"theta", theta}, {"t", t}, {"lambda", lambda}}};
}

/// Coefficient of gamma in the small-gamma expansion of the dissipative
/// geometric phase, omega = 1, omega0 = 0.
inline ClosedFormResult gamma_expansion_leading(double lambda, double theta, double t) {
    const double c = std::cos(theta);
    const double s2 = std::pow(std::sin(0.5 * theta), 2);
    const double den = std::cos(2.0 * theta) + 2.0 * std::pow(std::sin(theta), 2) * std::cos(t) + 3.0;
    if (std::abs(den) < kLogArgumentFloor) throw ConfigError("gamma_expansion_leading: vanishing denominator");
    const Complex shape{t - std::sin(t), std::cos(t) - 1.0};
    const Complex value = -2.0 * lambda * lambda * std::pow(std::sin(0.5 * t), 2) * shape / den * s2 * c * (c + 1.0);
    return {value, FormulaId::GammaExpansionLeading, {{"lambda", lambda}, {"theta", theta}, {"t", t}}};
}

}  // namespace geodec
