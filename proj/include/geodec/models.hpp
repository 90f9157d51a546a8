#pragma once

#include "geodec/bath.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace geodec {

enum class ModelKind { Dissipative2L, Dephasing2L, Leo3L };

inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Dissipative2L: return "dissipative";
        case ModelKind::Dephasing2L: return "dephasing";
        case ModelKind::Leo3L: return "leo";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view name) {
    if (name == "dissipative") return ModelKind::Dissipative2L;
    if (name == "dephasing") return ModelKind::Dephasing2L;
    if (name == "leo") return ModelKind::Leo3L;
    throw ConfigError("unknown model kind '" + std::string(name) + "' (expected dissipative, dephasing or leo)");
}

/// Leakage-elimination control amplitude c(t) = c_x (1 + sin(Omega_c t)).
struct ControlField {
    double c_x = 0.0;
    double Omega_c = 0.0;

    double operator()(double t) const noexcept { return c_x * (1.0 + std::sin(Omega_c * t)); }
    /// int_0^t c(s) ds
    double integral(double t) const noexcept {
        if (Omega_c == 0.0) return c_x * t;
        return c_x * (t + (1.0 - std::cos(Omega_c * t)) / Omega_c);
    }
};

inline constexpr double kRiccatiBlowUp = 1e6;
// |linear rate| * (dt/2) above this leaves the RK4 stability region.
inline constexpr double kRiccatiStiffnessLimit = 2.5;

using CoefficientSeries = std::vector<Complex>;

namespace detail {

inline void require_resolved(double rate, const TimeGrid& grid, const char* what) {
    if (rate * 0.5 * grid.dt > kRiccatiStiffnessLimit)
        throw ConfigError(std::string(what) + ": dt too large for the bath memory rate (need |gamma + i(omega0 - omega)| dt/2 <= 2.5)");
}

/// Classical RK4 on the half-step grid (step dt/2) for a small complex ODE
/// system y' = f(t, y) with y(t0) = 0.
template <std::size_t N, typename Rhs>
std::array<CoefficientSeries, N> integrate_coefficients(const TimeGrid& grid, Rhs&& rhs, const char* what) {
    using Vec = std::array<Complex, N>;
    const std::size_t n = grid.half_size();
    const double h = 0.5 * grid.dt;
    std::array<CoefficientSeries, N> out;
    for (auto& series : out) series.assign(n, Complex{});

    auto axpy = [](const Vec& y, double a, const Vec& k) {
        Vec r;
        for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + a * k[i];
        return r;
    };

    Vec y{};
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double t = grid.half_time(j);
        const Vec k1 = rhs(t, y);
        const Vec k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
        const Vec k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
        const Vec k4 = rhs(t + h, axpy(y, h, k3));
        for (std::size_t i = 0; i < N; ++i) {
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!(std::abs(y[i]) <= kRiccatiBlowUp))
                throw BlowUp(std::string(what) + ": coefficient exceeded 1e6", grid.half_time(j + 1));
            out[i][j + 1] = y[i];
        }
    }
    return out;
}

}  // namespace detail

/// Riccati coefficient of the dissipative model, O(t) = F(t) sigma_-:
/// F' = alpha(0) lambda - [gamma + i(omega0 - omega)] F + lambda F^2, F(0) = 0.
inline CoefficientSeries solve_dissipative_F(double omega, double lambda, const BathParams& bath, const TimeGrid& grid) {
    bath.validate();
    grid.validate();
    const Complex drift = bath.variance() * lambda;
    const Complex rate{bath.gamma, bath.omega0 - omega};
    detail::require_resolved(std::abs(rate), grid, "solve_dissipative_F");
    auto rhs = [&](double, const std::array<Complex, 1>& y) {
        return std::array<Complex, 1>{drift - rate * y[0] + lambda * y[0] * y[0]};
    };
    return detail::integrate_coefficients<1>(grid, rhs, "solve_dissipative_F")[0];
}

/// Coefficients of O(t) = F1 |3><1| + F2 |3><2| for the three-level model
/// under control c(t).
inline std::pair<CoefficientSeries, CoefficientSeries> solve_leo_F(double omega, double lambda, const BathParams& bath,
                                                                   const ControlField& control, const TimeGrid& grid) {
    bath.validate();
    grid.validate();
    const double a0 = bath.variance();
    detail::require_resolved(std::abs(Complex{bath.gamma, bath.omega0}) + 0.5 * std::abs(omega), grid, "solve_leo_F");
    auto rhs = [&](double t, const std::array<Complex, 2>& y) {
        const Complex sum = 2.0 * lambda * (y[0] + y[1]);
        const double c = control(t);
        const Complex common = sum - 2.0 * bath.gamma - 2.0 * kI * bath.omega0 + 2.0 * kI * c;
        return std::array<Complex, 2>{a0 * lambda + 0.5 * y[0] * (common + kI * omega),
                                      a0 * lambda + 0.5 * y[1] * (common - kI * omega)};
    };
    auto f = detail::integrate_coefficients<2>(grid, rhs, "solve_leo_F");
    return {std::move(f[0]), std::move(f[1])};
}

/// One of the built-in open-system models together with its noise-independent
/// O-operator coefficients on the half-step grid.
struct ModelSpec {
    ModelKind kind = ModelKind::Dephasing2L;
    int dim = 2;
    double omega = 1.0;
    double lambda = 1.0;
    BathParams bath;
    double theta = 0.0;
    std::optional<ControlField> control;
    TimeGrid grid;
    // Dissipative: {F}; Dephasing: {lambda*A}; Leo: {F1, F2}.
    std::vector<CoefficientSeries> obar_coeffs;
    // H_s(t_j) - i L^dagger O(t_j) on the half-step grid, filled by build_model.
    std::vector<Operator> h_eff;

    State initial_state() const {
        State psi = State::Zero(dim);
        psi[0] = std::cos(0.5 * theta);
        psi[1] = std::sin(0.5 * theta);
        return psi;
    }

    double control_at(double t) const { return control ? (*control)(t) : 0.0; }

    /// System Hamiltonian H_s(t) (including the control term for Leo3L).
    Operator hamiltonian(double t) const {
        Operator h = Operator::Zero(dim, dim);
        h(0, 0) = 0.5 * omega;
        h(1, 1) = -0.5 * omega;
        if (kind == ModelKind::Leo3L) {
            const double c = control_at(t);
            h(0, 0) += c;
            h(1, 1) += c;
        }
        return h;
    }

    /// Coupling operator L.
    Operator coupling() const {
        Operator l = Operator::Zero(dim, dim);
        switch (kind) {
            case ModelKind::Dissipative2L: l(1, 0) = lambda; break;
            case ModelKind::Dephasing2L:
                l(0, 0) = lambda;
                l(1, 1) = -lambda;
                break;
            case ModelKind::Leo3L:
                l(2, 0) = lambda;
                l(2, 1) = lambda;
                break;
        }
        return l;
    }

    /// O-bar operator at half-step index j.
    Operator obar(std::size_t j) const {
        Operator o = Operator::Zero(dim, dim);
        switch (kind) {
            case ModelKind::Dissipative2L: o(1, 0) = obar_coeffs[0][j]; break;
            case ModelKind::Dephasing2L:
                o(0, 0) = obar_coeffs[0][j];
                o(1, 1) = -obar_coeffs[0][j];
                break;
            case ModelKind::Leo3L:
                o(2, 0) = obar_coeffs[0][j];
                o(2, 1) = obar_coeffs[1][j];
                break;
        }
        return o;
    }

    /// L^dagger O-bar at half-step index j.
    Operator dissipator(std::size_t j) const { return coupling().adjoint() * obar(j); }

    /// Noise-free part of the Schroedinger-form generator,
    /// H_s(t) - i L^dagger O(t), at half-step index j.
    Operator effective_hamiltonian(std::size_t j) const {
        if (!h_eff.empty()) return h_eff[j];
        return hamiltonian(grid.half_time(j)) - kI * dissipator(j);
    }
};

inline ModelSpec build_model(ModelKind kind, double omega, double lambda, const BathParams& bath, double theta,
                             std::optional<ControlField> control, const TimeGrid& grid) {
    require_finite(omega, "omega");
    require_finite(lambda, "lambda");
    require_finite(theta, "theta");
    bath.validate();
    grid.validate();
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (theta < 0.0 || theta > kPi) throw ConfigError("theta must lie in [0, pi]");
    if (control && kind != ModelKind::Leo3L) throw ConfigError("control field is only valid for the leo model");
    if (!control && kind == ModelKind::Leo3L) throw ConfigError("leo model requires a control field (use c_x = 0 for none)");
    if (control) {
        require_finite(control->c_x, "c_x");
        require_finite(control->Omega_c, "Omega_c");
    }

    ModelSpec m;
    m.kind = kind;
    m.dim = kind == ModelKind::Leo3L ? 3 : 2;
    m.omega = omega;
    m.lambda = lambda;
    m.bath = bath;
    m.theta = theta;
    m.control = control;
    m.grid = grid;

    switch (kind) {
        case ModelKind::Dissipative2L: m.obar_coeffs.push_back(solve_dissipative_F(omega, lambda, bath, grid)); break;
        case ModelKind::Dephasing2L: {
            CoefficientSeries c(grid.half_size());
            for (std::size_t j = 0; j < c.size(); ++j) c[j] = lambda * kernel_integral(bath, grid.half_time(j) - grid.t0);
            m.obar_coeffs.push_back(std::move(c));
            break;
        }
        case ModelKind::Leo3L: {
            auto [f1, f2] = solve_leo_F(omega, lambda, bath, *control, grid);
            m.obar_coeffs.push_back(std::move(f1));
            m.obar_coeffs.push_back(std::move(f2));
            break;
        }
    }
    std::vector<Operator> cache(grid.half_size());
    for (std::size_t j = 0; j < cache.size(); ++j) cache[j] = m.effective_hamiltonian(j);
    m.h_eff = std::move(cache);
    return m;
}

/// Closed-system counterpart: same kind, omega, theta and grid, no coupling
/// and no control.
inline ModelSpec closed_counterpart(const ModelSpec& m) {
    std::optional<ControlField> control;
    if (m.kind == ModelKind::Leo3L) control = ControlField{0.0, 0.0};
    return build_model(m.kind, m.omega, 0.0, m.bath, m.theta, control, m.grid);
}

}  // namespace geodec
