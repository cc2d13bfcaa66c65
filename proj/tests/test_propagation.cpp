#include "excitonium/propagation.hpp"
#include "excitonium/units.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace excitonium;
using test_support::max_abs;

namespace {

RhsFunction scalar_decay() {
    return [](double, const StateVector& y, StateVector& dy) { dy = -y; };
}

// exp(A t) y0 through a complex eigendecomposition of A.
Eigen::VectorXcd expm_oracle(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& y0, double t) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
    const Eigen::MatrixXcd v = es.eigenvectors();
    const Eigen::VectorXcd ev = (es.eigenvalues() * t).array().exp();
    return v * ev.asDiagonal() * v.partialPivLu().solve(y0);
}

}  // namespace

TEST_CASE("zero right-hand side keeps the state") {
    StateVector y0(3);
    y0 << 1.0, complex(0.0, 2.0), -3.0;
    const std::vector<double> grid{0.0, 1.0, 5.0};
    const auto out = integrate([](double, const StateVector&, StateVector& dy) { dy.setZero(); }, y0, grid, {});
    REQUIRE(out.size() == 3);
    for (const auto& y : out) CHECK(y == y0);
}

TEST_CASE("rk4 on exponential decay") {
    StateVector y0(1);
    y0 << 1.0;
    IntegratorOptions o;
    o.dt = 0.01;
    const std::vector<double> grid{0.0, 1.0};
    const auto out = integrate(scalar_decay(), y0, grid, o);
    CHECK(std::abs(out.back()(0) - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("rk4 converges at fourth order") {
    StateVector y0(1);
    y0 << 1.0;
    const std::vector<double> grid{0.0, 2.0};
    std::vector<double> errors;
    for (double dt : {0.2, 0.1, 0.05}) {
        IntegratorOptions o;
        o.dt = dt;
        errors.push_back(std::abs(integrate(scalar_decay(), y0, grid, o).back()(0) - std::exp(-2.0)));
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double order = std::log2(errors[i - 1] / errors[i]);
        CHECK(order == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("linear systems match the matrix exponential") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    for (int n : {2, 5, 9}) {
        Eigen::MatrixXcd a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = complex(0.3 * g(rng), g(rng));
        }
        a -= 0.5 * Eigen::MatrixXcd::Identity(n, n);
        StateVector y0(n);
        for (int i = 0; i < n; ++i) y0(i) = complex(g(rng), g(rng));
        const auto rhs = [&](double, const StateVector& y, StateVector& dy) { dy.noalias() = a * y; };
        const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
        for (auto method : {IntegrationMethod::rk4, IntegrationMethod::adaptive45}) {
            IntegratorOptions o;
            o.method = method;
            o.dt = 0.002;
            o.rtol = 1e-12;
            o.atol = 1e-13;
            o.dt_max = 0.05;
            const auto out = integrate(rhs, y0, grid, o);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                CHECK((out[i] - expm_oracle(a, y0, grid[i])).cwiseAbs().maxCoeff() < 1e-8);
            }
        }
    }
}

TEST_CASE("nested linear rk4 equals classical rk4") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(6, 6);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = complex(g(rng), g(rng));
    StateVector y0(6);
    for (Eigen::Index i = 0; i < 6; ++i) y0(i) = complex(g(rng), g(rng));
    const std::vector<double> grid{0.0, 0.25, 0.7, 1.0, 2.0};
    IntegratorOptions o;
    o.dt = 0.1;
    o.record_stride = 2;

    std::vector<std::pair<std::size_t, StateVector>> classical, nested;
    integrate([&](double, const StateVector& y, StateVector& dy) { dy = a * y; }, y0, grid, o,
              [&](std::size_t i, double, const StateVector& y) { classical.emplace_back(i, y); });
    integrate_linear_rk4(
        [&](const StateVector& v, const StateVector& base, double scale, StateVector& out) {
            out = base + scale * (a * v);
        },
        y0, grid, o, [&](std::size_t i, double, const StateVector& y) { nested.emplace_back(i, y); });
    REQUIRE(classical.size() == nested.size());
    CHECK(nested.size() == 3);
    for (std::size_t k = 0; k < nested.size(); ++k) {
        CHECK(nested[k].first == classical[k].first);
        CHECK(max_abs(nested[k].second - classical[k].second) <= 1e-12 * max_abs(classical[k].second));
    }
    CHECK_THROWS_AS(integrate_linear_rk4([](const StateVector&, const StateVector&, double, StateVector&) {}, y0,
                                         std::vector<double>{0.0, 0.0}, o, [](std::size_t, double, const StateVector&) {}),
                    std::invalid_argument);
}

TEST_CASE("adaptive steps stop exactly on grid points") {
    StateVector y0(1);
    y0 << 1.0;
    IntegratorOptions o;
    o.method = IntegrationMethod::adaptive45;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    std::vector<double> seen;
    const std::vector<double> grid{0.0, 0.3, 0.7, 3.0};
    integrate(scalar_decay(), y0, grid, o, [&](std::size_t, double t, const StateVector& y) {
        seen.push_back(t);
        CHECK(std::abs(y(0) - std::exp(-t)) < 1e-8);
    });
    CHECK(seen == grid);

    o.dt_min = 1.0;
    o.dt_max = 1.0;
    o.rtol = 1e-16;
    o.atol = 1e-16;
    CHECK_THROWS_AS(integrate(scalar_decay(), y0, grid, o), IntegrationError);
}

TEST_CASE("record stride and grid checks") {
    StateVector y0(1);
    y0 << 1.0;
    IntegratorOptions o;
    o.record_stride = 3;
    std::vector<std::size_t> seen;
    const auto grid = make_time_grid(10.0, 1.0);
    integrate(scalar_decay(), y0, grid, o, [&](std::size_t i, double, const StateVector&) { seen.push_back(i); });
    CHECK(seen == std::vector<std::size_t>{0, 3, 6, 9, 10});

    const std::vector<double> bad{0.0, 2.0, 1.0};
    CHECK_THROWS_AS(integrate(scalar_decay(), y0, bad, {}), std::invalid_argument);
    IntegratorOptions zero_dt;
    zero_dt.dt = 0.0;
    CHECK_THROWS_AS(integrate(scalar_decay(), y0, grid, zero_dt), std::invalid_argument);
    IntegratorOptions zero_stride;
    zero_stride.record_stride = 0;
    CHECK_THROWS(zero_stride.validate());

    CHECK(make_time_grid(0.0, 1.0) == std::vector<double>{0.0});
    CHECK(make_time_grid(10.0, 3.0) == std::vector<double>{0.0, 3.0, 6.0, 9.0, 10.0});
    CHECK(make_time_grid(1.0, 0.1).size() == 11);
    CHECK(make_time_grid(1.0, 0.1)[7] == 7 * 0.1);
    CHECK_THROWS(make_time_grid(-1.0, 1.0));
    CHECK_THROWS(make_time_grid(1.0, 0.0));
    CHECK(parse_integration_method("adaptive45") == IntegrationMethod::adaptive45);
    CHECK(to_string(IntegrationMethod::rk4) == "rk4");
    CHECK_THROWS(parse_integration_method("euler"));
}

TEST_CASE("unitary oracle") {
    const auto h = build_fmo_hamiltonian();
    const auto rho0 = site_state(2, 7);
    CHECK(max_abs(unitary_oracle(h, rho0, 0.0).matrix() - rho0.matrix()) < 1e-14);

    Eigen::VectorXd e(3);
    e << 0.0, 100.0, 350.0;
    const ElectronicHamiltonian hd(Eigen::MatrixXd(e.asDiagonal()));
    const Eigen::MatrixXcd start = Eigen::MatrixXcd::Constant(3, 3, 1.0 / 3.0);
    for (double t : {1.0, 17.0, 250.0}) {
        const auto r = unitary_oracle(hd, SingleExcitationState(start), t);
        for (int a = 0; a < 3; ++a) {
            CHECK(r(a, a).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
            for (int b = 0; b < 3; ++b) {
                const complex phase = std::exp(complex(0.0, -units::wavenumber_to_angular(e(a) - e(b)) * t));
                CHECK(std::abs(r(a, b) - phase / 3.0) < 1e-14);
            }
        }
    }
}

TEST_CASE("rabi oscillation of a dimer") {
    const double j = 50.0;
    Eigen::MatrixXd m(2, 2);
    m << 0.0, j, j, 0.0;
    const ElectronicHamiltonian h(m);
    const double w = units::wavenumber_to_angular(j);
    const auto grid = make_time_grid(500.0, 5.0);
    IntegratorOptions o;
    o.dt = 0.25;
    const Eigen::MatrixXcd hc = m.cast<complex>() * units::wavenumber_to_rad_per_fs;
    const auto rhs = [&](double, const StateVector& y, StateVector& dy) {
        Eigen::Map<const Eigen::Matrix2cd> rho(y.data());
        Eigen::Map<Eigen::Matrix2cd> d(dy.data());
        d = complex(0.0, -1.0) * (hc * rho - rho * hc);
    };
    StateVector y0 = StateVector::Zero(4);
    y0(0) = 1.0;
    const auto out = integrate(rhs, y0, grid, o);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expected = std::pow(std::cos(w * grid[i]), 2);
        CHECK(std::abs(unitary_oracle(h, site_state(1, 2), grid[i])(0, 0).real() - expected) < 1e-12);
        CHECK(std::abs(out[i](0).real() - expected) < 1e-8);
    }
}
