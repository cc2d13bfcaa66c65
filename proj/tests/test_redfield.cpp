#include "excitonium/propagation.hpp"
#include "excitonium/redfield.hpp"
#include "excitonium/units.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace excitonium;
using test_support::max_abs;
using test_support::random_state;

namespace {

constexpr double kappa = units::wavenumber_to_rad_per_fs;

BathSpec bath(double t, double lambda = 35.0) {
    BathSpec b;
    b.lambda = lambda;
    b.temperature = t;
    return b;
}

std::vector<BathSpec> fmo_baths(double t) { return uniform_baths(fmo_bath(t), 7); }

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) m(a, b) = complex(g(rng), g(rng));
    }
    return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("zero coupling leaves the coherent part") {
    const auto h = build_fmo_hamiltonian();
    const auto t = build_redfield_tensor(h, uniform_baths(bath(300.0, 0.0), 7));
    CHECK(max_abs(t.tensor - coherent_generator(t.basis)) == 0.0);
    CHECK_THROWS(build_redfield_tensor(h, uniform_baths(bath(300.0), 6)));
}

TEST_CASE("trace and hermiticity preservation") {
    std::mt19937_64 rng(31);
    const auto h = build_fmo_hamiltonian();
    for (bool shift : {true, false}) {
        const auto full = build_redfield_tensor(h, fmo_baths(300.0), default_secular_cutoff, shift);
        const auto sec = secularize(full);
        for (int k = 0; k < 20; ++k) {
            const Eigen::MatrixXcd rho = random_hermitian(7, rng);
            for (const auto* t : {&full, &sec}) {
                const Eigen::MatrixXcd d = unvectorize(t->tensor * vectorize(rho), 7);
                CHECK(std::abs(d.trace()) < 1e-10);
                CHECK(max_abs(d - d.adjoint()) < 1e-10);
            }
        }
    }
}

TEST_CASE("two-level rates obey detailed balance") {
    for (double temp : {77.0, 300.0}) {
        Eigen::MatrixXd hm(2, 2);
        hm << 0.0, 40.0, 40.0, 150.0;
        const ElectronicHamiltonian h(hm);
        const auto t = build_redfield_tensor(h, uniform_baths(bath(temp), 2));
        const auto& u = t.basis.vectors;
        const double gap = t.basis.energies(1) - t.basis.energies(0);
        // Rate from exciton a to b: kappa sum_j (u_ja u_jb)^2 S(E_a - E_b).
        double w = 0.0;
        for (int j = 0; j < 2; ++j) w += std::pow(u(j, 0) * u(j, 1), 2);
        const double down = t.tensor(0 * 2 + 0, 1 * 2 + 1).real();
        const double up = t.tensor(1 * 2 + 1, 0 * 2 + 0).real();
        CHECK(down == doctest::Approx(kappa * w * bath_spectrum(gap, bath(temp))).epsilon(1e-12));
        CHECK(up == doctest::Approx(kappa * w * bath_spectrum(-gap, bath(temp))).epsilon(1e-12));
        const double beta = 1.0 / (0.695035 * temp);
        CHECK(std::abs(up / down - std::exp(-beta * gap)) < 1e-10);
    }
}

TEST_CASE("gibbs state is stationary under the secular generator") {
    const auto h = build_fmo_hamiltonian();
    for (double temp : {77.0, 300.0}) {
        const auto sec = secularize(build_redfield_tensor(h, fmo_baths(temp)));
        const auto g = gibbs_state(h, temp);
        const Eigen::VectorXcd d = sec.tensor * vectorize(sec.basis.to_exciton(g.matrix()));
        CHECK(d.norm() < 1e-10);
        CHECK(g.trace() == doctest::Approx(1.0));
    }
}

TEST_CASE("gibbs state examples") {
    Eigen::MatrixXd hm = Eigen::MatrixXd::Zero(2, 2);
    hm(1, 1) = 208.51;
    const auto g = gibbs_state(ElectronicHamiltonian(hm), 300.0);
    CHECK(g(0, 0).real() == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(g(1, 1).real() == doctest::Approx(0.2689).epsilon(1e-3));
    CHECK(g(0, 0).real() / g(1, 1).real() == doctest::Approx(std::exp(208.51 / (0.695035 * 300.0))));

    const auto h = build_fmo_hamiltonian();
    CHECK(gibbs_state(h, 300.0, 0.5).trace() == doctest::Approx(0.5));
    const auto hot = exciton_decomposition(h).to_exciton(gibbs_state(h, 1e9).matrix());
    for (int a = 0; a < 7; ++a) CHECK(hot(a, a).real() == doctest::Approx(1.0 / 7.0).epsilon(1e-6));
    CHECK_THROWS(gibbs_state(h, 0.0));
}

TEST_CASE("secularize is idempotent and structural") {
    const auto h = build_fmo_hamiltonian();
    const auto once = secularize(build_redfield_tensor(h, fmo_baths(300.0)));
    const auto twice = secularize(once);
    CHECK(once.tensor == twice.tensor);
    CHECK(once.secularized);

    // Diagonal H with distinct gaps: populations only couple to populations,
    // each coherence only to itself.
    Eigen::VectorXd e(4);
    e << 0.0, 100.0, 250.0, 480.0;
    const ElectronicHamiltonian hd(Eigen::MatrixXd(e.asDiagonal()));
    const auto t = secularize(build_redfield_tensor(hd, uniform_baths(bath(300.0), 4)));
    const int n = 4;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                for (int d = 0; d < n; ++d) {
                    const bool pops = a == b && c == d;
                    const bool same = a == c && b == d;
                    if (!pops && !same) CHECK(t.tensor(a * n + b, c * n + d) == complex(0.0, 0.0));
                }
            }
        }
    }
    // Nothing to drop there, so full and secular propagate identically.
    const auto full = build_redfield_tensor(hd, uniform_baths(bath(300.0), 4));
    CHECK(max_abs(full.tensor - t.tensor) == 0.0);
    std::mt19937_64 rng(32);
    const auto rho0 = random_state(4, rng);
    const auto grid = make_time_grid(200.0, 10.0);
    const auto a = propagate_redfield(full, TrappingSpec{}, rho0, grid, RedfieldVariant::full);
    const auto b = propagate_redfield(full, TrappingSpec{}, rho0, grid, RedfieldVariant::secular);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.states[i].matrix() == b.states[i].matrix());
}

TEST_CASE("basis round trip and vectorization") {
    std::mt19937_64 rng(33);
    const auto dec = exciton_decomposition(build_fmo_hamiltonian());
    for (int k = 0; k < 50; ++k) {
        const Eigen::MatrixXcd m = random_state(7, rng).matrix();
        CHECK(max_abs(dec.to_site(dec.to_exciton(m)) - m) < 1e-12);
        CHECK(unvectorize(vectorize(m), 7) == m);
        CHECK(vectorize(m)(2 * 7 + 5) == m(2, 5));
    }
}

TEST_CASE("closed system matches the unitary oracle") {
    const auto h = build_fmo_hamiltonian();
    const auto t = build_redfield_tensor(h, uniform_baths(bath(300.0, 0.0), 7));
    const auto grid = make_time_grid(1000.0, 10.0);
    IntegratorOptions io;
    io.dt = 0.25;
    for (auto v : {RedfieldVariant::full, RedfieldVariant::secular}) {
        const auto traj = propagate_redfield(t, TrappingSpec::none(), site_state(1, 7), grid, v, io);
        CHECK(traj.solver == to_string(v));
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, max_abs(traj.states[i].matrix() - unitary_oracle(h, site_state(1, 7), grid[i]).matrix()));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("trapping only and trace conservation") {
    const ElectronicHamiltonian zero(Eigen::MatrixXd::Zero(7, 7));
    const auto t0 = build_redfield_tensor(zero, uniform_baths(bath(300.0, 0.0), 7));
    const auto grid = make_time_grid(5000.0, 100.0);
    for (auto v : {RedfieldVariant::full, RedfieldVariant::secular}) {
        const auto traj = propagate_redfield(t0, TrappingSpec{}, site_state(3, 7), grid, v);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(traj.reports[i].trace - std::exp(-grid[i] / 4000.0)) < 1e-6);
    }

    const auto t = build_redfield_tensor(build_fmo_hamiltonian(), fmo_baths(300.0));
    ValidityTolerances relaxed;
    relaxed.negativity = 0.25;
    for (auto v : {RedfieldVariant::full, RedfieldVariant::secular}) {
        const auto traj = propagate_redfield(t, TrappingSpec::none(), site_state(1, 7), grid, v, {}, relaxed);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(traj.reports[i].trace - 1.0) < 1e-8);
    }
}

TEST_CASE("full redfield leaves the positive cone and is reported") {
    const auto t = build_redfield_tensor(build_fmo_hamiltonian(), fmo_baths(300.0));
    const auto grid = make_time_grid(200.0, 5.0);
    try {
        propagate_redfield(t, TrappingSpec{}, site_state(1, 7), grid, RedfieldVariant::full);
        FAIL("expected a positivity violation");
    } catch (const PropagationFailure& e) {
        CHECK(e.partial().size() >= 1);
        CHECK(validate_state(e.partial().states.back()).min_eigenvalue < -1e-6);
    }
    // The secular generator is of Lindblad form and stays positive.
    const auto sec = propagate_redfield(t, TrappingSpec{}, site_state(1, 7), grid, RedfieldVariant::secular);
    for (const auto& s : sec.states) CHECK(validate_state(s).min_eigenvalue > -1e-9);
}

TEST_CASE("secular steady state is the gibbs state") {
    const auto h = build_fmo_hamiltonian();
    const auto t = build_redfield_tensor(h, fmo_baths(300.0));
    const auto traj = propagate_redfield(t, TrappingSpec::none(), site_state(1, 7), make_time_grid(50000.0, 50000.0),
                                         RedfieldVariant::secular);
    const auto g = gibbs_state(h, 300.0);
    const Eigen::MatrixXcd diff = t.basis.to_exciton(traj.states.back().matrix() - g.matrix());
    CHECK(max_abs(diff) < 1e-6);
}
