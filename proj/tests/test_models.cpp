#include "support.hpp"

#include "catch_amalgamated.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

using namespace geodec;
using namespace geodec::testing;
using Catch::Approx;

namespace {

using OdeState = std::vector<double>;

/// Adaptive Dormand-Prince solution of a complex ODE system, sampled at the
/// requested times.
template <typename Rhs>
std::vector<std::vector<Complex>> dopri_oracle(std::size_t dim, Rhs rhs, const std::vector<double>& times) {
    namespace odeint = boost::numeric::odeint;
    auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
        std::vector<Complex> y(dim);
        for (std::size_t i = 0; i < dim; ++i) y[i] = {x[2 * i], x[2 * i + 1]};
        const std::vector<Complex> d = rhs(t, y);
        for (std::size_t i = 0; i < dim; ++i) {
            dxdt[2 * i] = d[i].real();
            dxdt[2 * i + 1] = d[i].imag();
        }
    };
    OdeState x(2 * dim, 0.0);
    std::vector<std::vector<Complex>> out;
    auto observer = [&](const OdeState& s, double) {
        std::vector<Complex> y(dim);
        for (std::size_t i = 0; i < dim; ++i) y[i] = {s[2 * i], s[2 * i + 1]};
        out.push_back(y);
    };
    auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<OdeState>());
    odeint::integrate_times(stepper, system, x, times.begin(), times.end(), 1e-4, observer);
    return out;
}

}  // namespace

TEST_CASE("ControlField") {
    const ControlField c{10.0, 50.0};
    CHECK(c(0.0) == 10.0);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double quad = GK::integrate([&](double s) { return c(s); }, 0.0, 2.3, 20, 1e-14);
    CHECK(c.integral(2.3) == Approx(quad).epsilon(1e-12));
    CHECK(ControlField{3.0, 0.0}.integral(2.0) == Approx(6.0));
}

TEST_CASE("dissipative Riccati coefficient") {
    const BathParams bath{1.0, 1.0, 0.0};
    const TimeGrid grid = period_grid();
    const CoefficientSeries F = solve_dissipative_F(1.0, 1.0, bath, grid);
    REQUIRE(F.size() == grid.half_size());
    CHECK(F[0] == Complex{});

    SECTION("finite-difference ODE residual at dt = 1e-3") {
        const TimeGrid g{0.0, 1e-3, 6283};
        const CoefficientSeries F = solve_dissipative_F(1.0, 1.0, bath, g);
        const double h = 0.5 * g.dt;
        const Complex rate{bath.gamma, bath.omega0 - 1.0};
        double worst = 0.0;
        for (std::size_t j = 1; j + 1 < F.size(); ++j) {
            const Complex deriv = (F[j + 1] - F[j - 1]) / (2.0 * h);
            const Complex rhs = bath.variance() - rate * F[j] + F[j] * F[j];
            worst = std::max(worst, std::abs(deriv - rhs));
        }
        CHECK(worst <= 1e-6);
    }

    SECTION("adaptive Dormand-Prince oracle") {
        std::vector<double> times;
        for (std::size_t j = 0; j < F.size(); j += 100) times.push_back(grid.half_time(j));
        const Complex rate{bath.gamma, bath.omega0 - 1.0};
        const auto oracle = dopri_oracle(
            1, [&](double, const std::vector<Complex>& y) { return std::vector<Complex>{bath.variance() - rate * y[0] + y[0] * y[0]}; },
            times);
        for (std::size_t i = 0; i < times.size(); ++i) CHECK(std::abs(oracle[i][0] - F[100 * i]) < 1e-10);
    }

    SECTION("two-term Taylor expansion at small t") {
        const TimeGrid fine{0.0, 1e-5, 10};
        const CoefficientSeries f = solve_dissipative_F(1.0, 1.0, bath, fine);
        const double t = 1e-4;
        const Complex kappa{bath.gamma, bath.omega0 - 1.0};
        const Complex taylor = bath.variance() * t - 0.5 * kappa * bath.variance() * t * t;
        CHECK(std::abs(f.back() - taylor) < 1e-12);
    }

    SECTION("Markov limit F -> lambda/2") {
        const CoefficientSeries markov = solve_dissipative_F(1.0, 1.0, BathParams{200.0, 1.0, 0.0}, grid);
        CHECK(std::abs(markov.back() - 0.5) < 0.005);
    }

    SECTION("first differences shrink linearly with dt") {
        auto max_jump = [&](double frac) {
            const auto f = solve_dissipative_F(1.0, 1.0, bath, period_grid(frac));
            double m = 0.0;
            for (std::size_t j = 2; j < f.size(); j += 2) m = std::max(m, std::abs(f[j] - f[j - 2]));
            return m;
        };
        CHECK(max_jump(1e-3) / max_jump(5e-4) == Approx(2.0).epsilon(0.02));
    }

    CHECK_THROWS_AS(solve_dissipative_F(1.0, 1.0, BathParams{1000.0, 1.0, 0.0}, period_grid()), ConfigError);
}

TEST_CASE("three-level coefficients") {
    const BathParams bath{0.3, 1.0, 0.0};
    const ControlField control{10.0, 50.0};
    const TimeGrid grid = TimeGrid::with_step(0.0, kTwoPi, default_leo_dt(1.0));
    const auto [F1, F2] = solve_leo_F(1.0, 1.0, bath, control, grid);
    CHECK(F1[0] == Complex{});
    CHECK(F2[0] == Complex{});

    SECTION("omega = 0 makes the two equations identical") {
        const auto [g1, g2] = solve_leo_F(0.0, 1.0, bath, control, period_grid());
        for (std::size_t j = 0; j < g1.size(); ++j) CHECK(g1[j] == g2[j]);
    }

    SECTION("adaptive Dormand-Prince oracle at the control parameters") {
        std::vector<double> times;
        for (std::size_t j = 0; j < F1.size(); j += 1000) times.push_back(grid.half_time(j));
        const double a0 = bath.variance();
        auto rhs = [&](double t, const std::vector<Complex>& y) {
            const Complex common = 2.0 * (y[0] + y[1]) - 2.0 * bath.gamma + 2.0 * kI * control(t);
            return std::vector<Complex>{a0 + 0.5 * y[0] * (common + kI), a0 + 0.5 * y[1] * (common - kI)};
        };
        const auto oracle = dopri_oracle(2, rhs, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            CHECK(std::abs(oracle[i][0] - F1[1000 * i]) < 1e-6);
            CHECK(std::abs(oracle[i][1] - F2[1000 * i]) < 1e-6);
        }
    }

    SECTION("step-halving oracle") {
        const TimeGrid half = TimeGrid::with_step(0.0, kTwoPi, 0.5 * grid.dt);
        const auto [h1, h2] = solve_leo_F(1.0, 1.0, bath, control, half);
        double worst = 0.0;
        for (std::size_t j = 0; j < F1.size(); ++j) worst = std::max({worst, std::abs(F1[j] - h1[2 * j]), std::abs(F2[j] - h2[2 * j])});
        CHECK(worst < 1e-6);
    }

    SECTION("finite-difference ODE residual at dt = 1e-3") {
        const TimeGrid g{0.0, 1e-3, 6283};
        const auto [f1, f2] = solve_leo_F(1.0, 1.0, bath, ControlField{2.0, 5.0}, g);
        const double h = 0.5 * g.dt;
        const double a0 = bath.variance();
        double worst = 0.0;
        for (std::size_t j = 1; j + 1 < f1.size(); ++j) {
            const double c = ControlField{2.0, 5.0}(g.half_time(j));
            const Complex common = 2.0 * (f1[j] + f2[j]) - 2.0 * bath.gamma + 2.0 * kI * c;
            worst = std::max(worst, std::abs((f1[j + 1] - f1[j - 1]) / (2.0 * h) - (a0 + 0.5 * f1[j] * (common + kI))));
            worst = std::max(worst, std::abs((f2[j + 1] - f2[j - 1]) / (2.0 * h) - (a0 + 0.5 * f2[j] * (common - kI))));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("build_model") {
    const TimeGrid grid = period_grid();
    const BathParams bath{1.0, 1.0, 0.0};

    const ModelSpec deph = build_model(ModelKind::Dephasing2L, 1.0, 0.7, bath, 1.2, std::nullopt, grid);
    CHECK(deph.obar_coeffs[0][0] == Complex{});
    for (std::size_t j = 0; j < grid.half_size(); j += 97) CHECK(deph.obar_coeffs[0][j] == 0.7 * kernel_integral(bath, grid.half_time(j)));
    CHECK(deph.initial_state().norm() == Approx(1.0));
    CHECK(deph.initial_state()[0] == Complex{std::cos(0.6), 0.0});

    const ModelSpec diss = build_model(ModelKind::Dissipative2L, 1.0, 1.0, bath, 1.0, std::nullopt, grid);
    CHECK(diss.obar_coeffs[0] == solve_dissipative_F(1.0, 1.0, bath, grid));

    const ModelSpec leo = build_model(ModelKind::Leo3L, 1.0, 1.0, BathParams{0.3, 1.0, 0.0}, 1.0, ControlField{0.0, 50.0}, grid);
    CHECK(leo.dim == 3);
    CHECK(leo.initial_state()[2] == Complex{});
    for (double t : {0.0, 1.0, 3.0}) CHECK(leo.hamiltonian(t) == closed_counterpart(leo).hamiltonian(t));

    const ModelSpec ctrl = build_model(ModelKind::Leo3L, 1.0, 1.0, BathParams{0.3, 1.0, 0.0}, 1.0, ControlField{2.0, 3.0}, grid);
    CHECK_THROWS_AS(build_model(ModelKind::Leo3L, 1.0, 1.0, bath, 1.0, ControlField{0.0, 50.0}, grid), BlowUp);
    CHECK(ctrl.hamiltonian(0.5)(0, 0) == Complex{0.5 + ControlField{2.0, 3.0}(0.5), 0.0});
    CHECK(ctrl.hamiltonian(0.5)(2, 2) == Complex{});

    CHECK_THROWS_AS(build_model(ModelKind::Dephasing2L, 1.0, 1.0, bath, 1.0, ControlField{1.0, 1.0}, grid), ConfigError);
    CHECK_THROWS_AS(build_model(ModelKind::Leo3L, 1.0, 1.0, bath, 1.0, std::nullopt, grid), ConfigError);
    CHECK_THROWS_AS(build_model(ModelKind::Dephasing2L, 1.0, 1.0, bath, 3.5, std::nullopt, grid), ConfigError);
    CHECK_THROWS_AS(build_model(ModelKind::Dephasing2L, 1.0, -1.0, bath, 1.0, std::nullopt, grid), ConfigError);
    CHECK(parse_model_kind("leo") == ModelKind::Leo3L);
    CHECK_THROWS_AS(parse_model_kind("spin-boson"), ConfigError);
}
