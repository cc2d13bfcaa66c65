#include "excitonium/heom.hpp"
#include "excitonium/propagation.hpp"
#include "excitonium/units.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace excitonium;
using test_support::max_abs;
using test_support::random_state;

namespace {

constexpr double kappa = units::wavenumber_to_rad_per_fs;

ElectronicHamiltonian small_h(int n, std::mt19937_64& rng) {
    Eigen::MatrixXd m = test_support::random_symmetric(n, rng, 80.0);
    return ElectronicHamiltonian(m);
}

BathSpec bath(double t, int k, double lambda = 35.0) {
    BathSpec b;
    b.lambda = lambda;
    b.temperature = t;
    b.n_matsubara = k;
    return b;
}

// Straightforward HEOM with a map of multi-indices and dense commutators.
// Unscaled auxiliaries; terminator and trapping act on every ADO.
class ReferenceHeom {
public:
    using Index = std::vector<int>;

    ReferenceHeom(const Eigen::MatrixXd& h, const std::vector<BathSpec>& baths, TrappingSpec trap, int depth,
                  bool terminator)
        : n_(static_cast<int>(h.rows())), terms_(baths.front().n_matsubara + 1), h_(kappa * h.cast<complex>()) {
        for (int j = 0; j < n_; ++j) {
            const auto e = correlation_coefficients(baths[j]);
            for (int k = 0; k < terms_; ++k) {
                c_.push_back(kappa * kappa * e.c[k]);
                nu_.push_back(kappa * e.nu[k]);
            }
            delta_.push_back(terminator ? kappa * terminator_rate(baths[j]) : 0.0);
        }
        trap_ = Eigen::MatrixXcd::Zero(n_, n_);
        if (trap.enabled()) trap_(trap.site - 1, trap.site - 1) = 0.5 * trap.rate;
        Index cur;
        build(cur, depth);
    }

    std::map<Index, Eigen::MatrixXcd> initial(const Eigen::MatrixXcd& rho0) const {
        std::map<Index, Eigen::MatrixXcd> s;
        for (const auto& i : indices_) s[i] = Eigen::MatrixXcd::Zero(n_, n_);
        s[Index(n_ * terms_, 0)] = rho0;
        return s;
    }

    std::map<Index, Eigen::MatrixXcd> rhs(const std::map<Index, Eigen::MatrixXcd>& s) const {
        const complex i(0.0, 1.0);
        std::map<Index, Eigen::MatrixXcd> out;
        for (const auto& [idx, rho] : s) {
            Eigen::MatrixXcd d = -i * (h_ * rho - rho * h_) - (trap_ * rho + rho * trap_);
            for (int m = 0; m < n_ * terms_; ++m) d -= double(idx[m]) * nu_[m] * rho;
            for (int j = 0; j < n_; ++j) {
                Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n_, n_);
                v(j, j) = 1.0;
                const Eigen::MatrixXcd c1 = v * rho - rho * v;
                d -= delta_[j] * (v * c1 - c1 * v);
                for (int k = 0; k < terms_; ++k) {
                    const int m = j * terms_ + k;
                    Index up = idx;
                    ++up[m];
                    if (auto it = s.find(up); it != s.end()) d += -i * (v * it->second - it->second * v);
                    if (idx[m] > 0) {
                        Index down = idx;
                        --down[m];
                        const auto& x = s.at(down);
                        d += -i * double(idx[m]) * (c_[m] * v * x - std::conj(c_[m]) * x * v);
                    }
                }
            }
            out[idx] = d;
        }
        return out;
    }

    Eigen::MatrixXcd propagate(const Eigen::MatrixXcd& rho0, double t, double dt) const {
        auto y = initial(rho0);
        const auto axpy = [](const std::map<Index, Eigen::MatrixXcd>& a, double h,
                             const std::map<Index, Eigen::MatrixXcd>& b) {
            auto r = a;
            for (auto& [k, v] : r) v += h * b.at(k);
            return r;
        };
        const int steps = static_cast<int>(std::lround(t / dt));
        for (int s = 0; s < steps; ++s) {
            const auto k1 = rhs(y);
            const auto k2 = rhs(axpy(y, 0.5 * dt, k1));
            const auto k3 = rhs(axpy(y, 0.5 * dt, k2));
            const auto k4 = rhs(axpy(y, dt, k3));
            for (auto& [k, v] : y) v += dt / 6.0 * (k1.at(k) + 2.0 * k2.at(k) + 2.0 * k3.at(k) + k4.at(k));
        }
        return y.at(Index(n_ * terms_, 0));
    }

    std::size_t size() const { return indices_.size(); }

private:
    void build(Index& cur, int left) {
        if (static_cast<int>(cur.size()) == n_ * terms_) {
            indices_.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur.push_back(v);
            build(cur, left - v);
            cur.pop_back();
        }
    }

    int n_;
    int terms_;
    Eigen::MatrixXcd h_;
    Eigen::MatrixXcd trap_;
    std::vector<complex> c_;
    std::vector<double> nu_;
    std::vector<double> delta_;
    std::vector<Index> indices_;
};

// State with populated auxiliaries: a few RK4 steps from rho0 with the general kernel.
Eigen::VectorXcd warmed_up(const HeomModel& model, const SingleExcitationState& rho0, int steps) {
    Eigen::VectorXcd y = model.initial_state(rho0).data;
    Eigen::VectorXcd k(y.size());
    for (int s = 0; s < steps; ++s) {
        model.rhs(y, k);
        y += 2.0 * k;
    }
    return y;
}

}  // namespace

TEST_CASE("model construction checks") {
    const auto h = build_fmo_hamiltonian();
    CHECK(uniform_baths(bath(300, 0), 7).size() == 7);
    CHECK_THROWS_AS(HeomModel(h, uniform_baths(bath(300, 0), 6), TrappingSpec{}), std::invalid_argument);
    auto mixed = uniform_baths(bath(77, 3), 7);
    mixed[2].n_matsubara = 1;
    CHECK_THROWS_AS(HeomModel(h, mixed, TrappingSpec{}), std::invalid_argument);
    CHECK_THROWS(HeomModel(h, uniform_baths(bath(300, 0), 7), TrappingSpec{8, 0.001}));
    CHECK_FALSE(TrappingSpec::none().enabled());

    HeomOptions opts;
    opts.depth = 2;
    HeomModel model(h, uniform_baths(bath(300, 0), 7), TrappingSpec{}, opts);
    Eigen::MatrixXcd bad = site_state(1, 7).matrix();
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(model.initial_state(SingleExcitationState(bad)), std::invalid_argument);
    Eigen::VectorXcd wrong(3), dy;
    CHECK_THROWS_AS(model.rhs(wrong, dy), std::invalid_argument);
}

TEST_CASE("hermitian kernel equals the general kernel") {
    std::mt19937_64 rng(21);
    for (int n : {2, 3, 7}) {
        const auto h = n == 7 ? build_fmo_hamiltonian() : small_h(n, rng);
        auto baths = uniform_baths(bath(77, 2), n);
        for (int j = 0; j < n; ++j) baths[j].lambda = 10.0 + 7.0 * j;
        HeomOptions general;
        general.depth = 3;
        general.hermitian_kernel = false;
        general.workers = 1;
        HeomOptions herm = general;
        herm.hermitian_kernel = true;
        const TrappingSpec trap{std::min(3, n), 0.002};
        HeomModel a(h, baths, trap, general);
        HeomModel b(h, baths, trap, herm);
        const auto rho0 = random_state(n, rng);
        const Eigen::VectorXcd y = warmed_up(a, rho0, 5);
        Eigen::VectorXcd da, db;
        a.rhs(y, da);
        b.rhs(y, db);
        CHECK((da - db).cwiseAbs().maxCoeff() <= 1e-12 * da.cwiseAbs().maxCoeff());

        // The one-shot helper uses the general kernel.
        HierarchyState s{std::make_shared<const Hierarchy>(a.hierarchy().n_sites(), 2, 3), y};
        const auto d = heom_rhs(s, h, baths, trap);
        CHECK((d.data - da).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("fused stage equals base plus scaled derivative") {
    std::mt19937_64 rng(23);
    for (bool hermitian : {true, false}) {
        HeomOptions opts;
        opts.depth = 3;
        opts.hermitian_kernel = hermitian;
        const auto h = build_fmo_hamiltonian();
        HeomModel model(h, uniform_baths(bath(77, 2), 7), TrappingSpec{}, opts);
        const Eigen::VectorXcd v = warmed_up(model, random_state(7, rng), 4);
        const Eigen::VectorXcd base = warmed_up(model, random_state(7, rng), 3);
        Eigen::VectorXcd d, out;
        model.rhs(v, d);
        model.stage(v, base, 0.37, out);
        const Eigen::VectorXcd expected = base + 0.37 * d;
        CHECK((out - expected).cwiseAbs().maxCoeff() <= 1e-13 * expected.cwiseAbs().maxCoeff());

        Eigen::VectorXcd in_place = base;
        model.stage(v, in_place, 0.37, in_place);
        CHECK((in_place - out).cwiseAbs().maxCoeff() == 0.0);
        CHECK_THROWS_AS(model.stage(v, base, 1.0, const_cast<Eigen::VectorXcd&>(v)), std::invalid_argument);
    }
}

TEST_CASE("hierarchy matches a reference implementation") {
    std::mt19937_64 rng(22);
    for (auto [n, k, depth, temp] : {std::tuple{2, 1, 3, 77.0}, std::tuple{3, 0, 4, 300.0}, std::tuple{3, 2, 2, 150.0}}) {
        const auto h = small_h(n, rng);
        auto baths = uniform_baths(bath(temp, k), n);
        baths[0].lambda = 20.0;
        baths[n - 1].gamma = 0.02;
        const TrappingSpec trap{2, 0.004};
        const ReferenceHeom ref(h.matrix(), baths, trap, depth, true);
        HeomOptions opts;
        opts.depth = depth;
        const auto rho0 = random_state(n, rng);
        const auto grid = make_time_grid(100.0, 100.0);
        IntegratorOptions io;
        io.dt = 0.25;
        const auto traj = propagate_heom(h, baths, trap, rho0, grid, opts, io);
        CHECK(HeomModel(h, baths, trap, opts).hierarchy().size() == ref.size());
        const Eigen::MatrixXcd expected = ref.propagate(rho0.matrix(), 100.0, 0.25);
        CHECK(max_abs(traj.states.back().matrix() - expected) < 1e-11);
        CHECK(max_abs(traj.states.back().matrix() - rho0.matrix()) > 1e-3);
    }
}

TEST_CASE("pure dephasing coherence follows the lineshape function") {
    // Diagonal H: |rho_12(t)| = |rho_12(0)| exp(-2 Re g(t)) for the correlation
    // function the hierarchy represents (Drude term plus white-noise terminator).
    Eigen::MatrixXd hm(2, 2);
    hm << 0.0, 0.0, 0.0, 120.0;
    const ElectronicHamiltonian h(hm);
    const BathSpec b = bath(300.0, 0);
    const auto e = correlation_coefficients(b);
    const double delta = terminator_rate(b);
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Constant(2, 2, 0.5);
    HeomOptions opts;
    opts.depth = 30;
    IntegratorOptions io;
    io.dt = 0.25;
    const auto grid = make_time_grid(400.0, 20.0);
    const auto traj = propagate_heom(h, uniform_baths(b, 2), TrappingSpec::none(), SingleExcitationState(rho0), grid,
                                     opts, io);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = kappa * e.nu[0] * grid[i];
        const double re_g = e.c[0].real() / (e.nu[0] * e.nu[0]) * (x - 1.0 + std::exp(-x)) + kappa * delta * grid[i];
        const complex expected = 0.5 * std::exp(-2.0 * re_g) * std::exp(complex(0.0, kappa * 120.0 * grid[i]));
        CHECK(std::abs(traj.states[i](0, 1) - expected) < 1e-9);
        CHECK(traj.states[i](0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("closed system reduces to unitary dynamics") {
    // The residual is RK4 truncation: halving the step divides it by 16.
    const auto h = build_fmo_hamiltonian();
    const auto rho0 = site_state(1, 7);
    const auto grid = make_time_grid(1000.0, 10.0);
    for (int depth : {0, 3}) {
        std::vector<double> errors;
        for (double dt : {0.5, 0.25}) {
            IntegratorOptions io;
            io.dt = dt;
            HeomOptions opts;
            opts.depth = depth;
            const auto traj = propagate_heom(h, uniform_baths(bath(300.0, 0, 0.0), 7), TrappingSpec::none(), rho0,
                                             grid, opts, io);
            double worst = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                worst = std::max(worst, max_abs(traj.states[i].matrix() - unitary_oracle(h, rho0, grid[i]).matrix()));
            }
            errors.push_back(worst);
        }
        CHECK(errors[1] < 1e-8);
        CHECK(errors[0] / errors[1] == doctest::Approx(16.0).epsilon(0.05));
    }
}

TEST_CASE("trapping alone gives exponential trace decay") {
    const ElectronicHamiltonian h(Eigen::MatrixXd::Zero(7, 7));
    const auto grid = make_time_grid(5000.0, 50.0);
    HeomOptions opts;
    opts.depth = 2;
    const auto traj = propagate_heom(h, uniform_baths(bath(300.0, 0, 0.0), 7), TrappingSpec{}, site_state(3, 7), grid, opts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(traj.reports[i].trace - std::exp(-grid[i] / 4000.0)) < 1e-6);
        CHECK(traj.trapped_population(i) == doctest::Approx(1.0 - std::exp(-grid[i] / 4000.0)).epsilon(1e-6));
    }
}

TEST_CASE("trace, hermiticity and positivity along an fmo trajectory") {
    const auto h = build_fmo_hamiltonian();
    const auto grid = make_time_grid(1000.0, 5.0);
    HeomOptions opts;
    opts.depth = 4;
    const auto trapped = propagate_heom(h, uniform_baths(fmo_bath(300.0), 7), TrappingSpec{}, site_state(1, 7), grid, opts);
    const auto closed = propagate_heom(h, uniform_baths(fmo_bath(300.0), 7), TrappingSpec::none(), site_state(1, 7), grid, opts);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(trapped.reports[i].trace <= trapped.reports[i - 1].trace + 1e-12);
        CHECK(std::abs(closed.reports[i].trace - 1.0) < 1e-8);
        const auto d = validate_state(trapped.states[i]);
        CHECK(d.hermiticity_defect < 1e-8);
        CHECK(d.min_eigenvalue > -1e-6);
    }
    CHECK(trapped.reports.back().trace < 0.99);
}

TEST_CASE("halving the step barely moves the entanglement") {
    const auto h = build_fmo_hamiltonian();
    const auto grid = make_time_grid(1000.0, 5.0);
    HeomOptions opts;
    IntegratorOptions fine;
    fine.dt = 0.5;
    const auto a = propagate_heom(h, uniform_baths(fmo_bath(300.0), 7), TrappingSpec{}, site_state(1, 7), grid, opts);
    const auto b = propagate_heom(h, uniform_baths(fmo_bath(300.0), 7), TrappingSpec{}, site_state(1, 7), grid, opts, fine);
    CHECK(compare_trajectories(a, b).max_entanglement_deviation < 1e-4);
}

TEST_CASE("worker count does not change a single bit") {
    const auto h = build_fmo_hamiltonian();
    const auto grid = make_time_grid(100.0, 5.0);
    std::vector<Trajectory> runs;
    for (int workers : {1, 3, 8}) {
        HeomOptions opts;
        opts.depth = 3;
        opts.workers = workers;
        runs.push_back(propagate_heom(h, uniform_baths(fmo_bath(77.0), 7), TrappingSpec{}, site_state(6, 7), grid, opts));
    }
    for (std::size_t r = 1; r < runs.size(); ++r) {
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(runs[r].states[i].matrix() == runs[0].states[i].matrix());
    }
}

TEST_CASE("empty grid and convergence scan edge cases") {
    const auto h = build_fmo_hamiltonian();
    const auto traj = propagate_heom(h, uniform_baths(fmo_bath(300.0), 7), TrappingSpec{}, site_state(1, 7), {});
    REQUIRE(traj.size() == 1);
    CHECK(traj.reports[0].global_E == 0.0);
    CHECK(traj.reports[0].trace == 1.0);
    CHECK_THROWS(propagate_heom(h, uniform_baths(fmo_bath(300.0), 7), TrappingSpec{}, site_state(1, 7), {1.0, 2.0}));

    const auto grid = make_time_grid(200.0, 10.0);
    const auto same = convergence_scan(h, fmo_bath(300.0), TrappingSpec{}, site_state(1, 7), grid, {2, 2}, {0});
    REQUIRE(same.size() == 1);
    CHECK(same[0].max_entanglement_deviation == 0.0);
    CHECK(same[0].max_population_deviation == 0.0);

    const auto free = convergence_scan(h, bath(300.0, 0, 0.0), TrappingSpec{}, site_state(1, 7), grid, {1, 3}, {0, 1});
    REQUIRE(free.size() == 2);
    for (const auto& row : free) {
        CHECK(row.max_entanglement_deviation == 0.0);
        CHECK(row.max_population_deviation == 0.0);
    }
    CHECK(free[1].from.n_matsubara == 0);
    CHECK(free[1].to.n_matsubara == 1);
    CHECK(free[1].to.depth == 3);
    CHECK_THROWS(convergence_scan(h, fmo_bath(300.0), TrappingSpec{}, site_state(1, 7), grid, {4}, {0}));
}

TEST_CASE("site-1 population shows recurrences at 77 K") {
    const auto h = build_fmo_hamiltonian();
    const auto grid = make_time_grid(500.0, 2.0);
    HeomOptions opts;
    opts.depth = 3;
    const auto traj = propagate_heom(h, uniform_baths(fmo_bath(77.0), 7), TrappingSpec{}, site_state(1, 7), grid, opts);
    const auto p = traj.population(1);
    int minima = 0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i] < p[i - 1] && p[i] < p[i + 1]) ++minima;
    }
    CHECK(minima >= 2);
    CHECK(*std::min_element(p.begin(), p.end()) < 0.6);
}
