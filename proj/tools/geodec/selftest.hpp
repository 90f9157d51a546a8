#pragma once

#include "geodec/geodec.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cstdio>
#include <functional>

namespace geodec::cli {

struct OracleCheck {
    std::string name;
    double error;
    double tolerance;
};

inline std::vector<OracleCheck> run_oracle_suite() {
    std::vector<OracleCheck> out;
    auto check = [&](std::string name, double err, double tol) { out.push_back({std::move(name), err, tol}); };

    for (double theta : {0.4, 1.0, 2.0})
        check("markov_phase at lambda=0 equals pi(1+cos theta), theta=" + format_number(theta),
              std::abs(markov_phase(0.0, theta).value - Complex{kPi * (1.0 + std::cos(theta)), 0.0}), 1e-12);
    check("markov_phase at theta=pi/2 equals pi", std::abs(markov_phase(1.3, 0.5 * kPi).value - Complex{kPi, 0.0}), 1e-12);

    check("closed_system_phase theta=pi/2, t=2pi (mod pi)", phase_distance(closed_system_phase(1.0, 0.5 * kPi, kTwoPi).value, Complex{kPi, 0.0}), 1e-12);
    check("closed_system_phase theta=0", std::abs(closed_system_phase(1.0, 0.0, 2.7).value), 1e-12);
    check("closed_system_phase theta=1.2, t=2pi (mod pi)",
          phase_distance(closed_system_phase(1.0, 1.2, kTwoPi).value, Complex{kPi * (1.0 + std::cos(1.2)), 0.0}), 1e-12);

    const BathParams bath{1.3, 0.8, 0.4};
    for (double t : {0.5, 3.0, 6.0}) {
        const auto p = dephasing_avg_phases(1.0, 0.7, bath, 1.1, t);
        check("dephasing tot - dyn - beta = 0, t=" + format_number(t), std::abs(p.beta_tot - p.beta_dyn - p.beta), 1e-14);
        check("dephasing Im beta = 0, t=" + format_number(t), std::abs(p.beta.imag()), 1e-14);
    }

    check("lambda expansion at lambda=0 equals the closed system",
          std::abs(lambda_expansion_phase(1.0, 1.0, 2.0, 0.0).value - closed_system_phase(1.0, 1.0, 2.0).value), 1e-14);
    check("gamma coefficient vanishes at theta=0", std::abs(gamma_expansion_leading(1.0, 0.0, 2.0).value), 1e-14);
    check("gamma coefficient vanishes at theta=pi/2", std::abs(gamma_expansion_leading(1.0, 0.5 * kPi, 2.0).value), 1e-14);

    for (double t : {0.3, 1.0, 4.0}) {
        auto re = [&](double s) { return kernel(bath, t, s).real(); };
        auto im = [&](double s) { return kernel(bath, t, s).imag(); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        const Complex quad{GK::integrate(re, 0.0, t, 10, 1e-14), GK::integrate(im, 0.0, t, 10, 1e-14)};
        check("kernel_integral vs Gauss-Kronrod, t=" + format_number(t), std::abs(kernel_integral(bath, t) - quad), 1e-10);
    }

    {
        const TimeGrid grid = TimeGrid::with_step(0.0, kTwoPi, 1e-3 * kTwoPi);
        const ModelSpec m = build_model(ModelKind::Dissipative2L, 1.0, 0.0, BathParams{}, 1.0, std::nullopt, grid);
        const auto tot = dissipative_avg_total_phase_series(1.0, 0.0, 1.0, grid, m.obar_coeffs[0]);
        const auto dyn = dissipative_avg_dyn_phase_series(1.0, 0.0, 1.0, grid, m.obar_coeffs[0]);
        check("dissipative averaged phases at lambda=0 reduce to the closed system (mod pi)",
              phase_distance(tot.back() - dyn.back(), closed_system_phase(1.0, 1.0, kTwoPi).value), 1e-9);
        const auto south = dissipative_avg_dyn_phase_series(1.0, 1.0, kPi, grid, m.obar_coeffs[0]);
        check("dissipative averaged dynamical phase at theta=pi is +omega t/2", std::abs(south.back() - 0.5 * kTwoPi), 1e-9);
    }

    {
        const TimeGrid grid = TimeGrid::with_step(0.0, kTwoPi, 1e-3 * kTwoPi);
        const ModelSpec m = build_model(ModelKind::Dissipative2L, 1.0, 1.0, BathParams{}, 1.0, std::nullopt, grid);
        const PhaseSeries pipeline = mean_phase_series(m);
        const PhaseSeries closed = analytic_phase_series(m);
        check("zero-noise pipeline vs averaged dissipative total phase", phase_distance(pipeline.beta_tot.back(), closed.beta_tot.back()),
              1e-6);
        check("zero-noise pipeline vs averaged dissipative dynamical phase", std::abs(pipeline.beta_dyn.back() - closed.beta_dyn.back()),
              1e-6);
    }
    return out;
}

}  // namespace geodec::cli
