#include "excitonium/propagation.hpp"

#include "excitonium/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace excitonium {

std::string to_string(IntegrationMethod m) { return m == IntegrationMethod::rk4 ? "rk4" : "adaptive45"; }

IntegrationMethod parse_integration_method(const std::string& name) {
    if (name == "rk4") return IntegrationMethod::rk4;
    if (name == "adaptive45") return IntegrationMethod::adaptive45;
    throw std::invalid_argument("unknown integration method '" + name + "' (expected rk4 or adaptive45)");
}

void IntegratorOptions::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("integrator dt must be > 0");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("integrator rtol and atol must be > 0");
    if (!(dt_min > 0.0) || !(dt_max >= dt_min)) throw std::invalid_argument("integrator needs 0 < dt_min <= dt_max");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
}

namespace {

// Classical RK4 with one stage derivative, an accumulator and a stage state;
// each stage update is a single pass over memory.
class Rk4 {
public:
    explicit Rk4(Eigen::Index n) : k_(n), acc_(n), stage_(n) {}

    void step(const RhsFunction& f, double t, double h, StateVector& y) {
        const Eigen::Index n = y.size();
        complex* yp = y.data();
        complex* k = k_.data();
        complex* acc = acc_.data();
        complex* stage = stage_.data();

        f(t, y, k_);
        for (Eigen::Index i = 0; i < n; ++i) {
            acc[i] = yp[i] + (h / 6.0) * k[i];
            stage[i] = yp[i] + (0.5 * h) * k[i];
        }
        f(t + 0.5 * h, stage_, k_);
        for (Eigen::Index i = 0; i < n; ++i) {
            acc[i] += (h / 3.0) * k[i];
            stage[i] = yp[i] + (0.5 * h) * k[i];
        }
        f(t + 0.5 * h, stage_, k_);
        for (Eigen::Index i = 0; i < n; ++i) {
            acc[i] += (h / 3.0) * k[i];
            stage[i] = yp[i] + h * k[i];
        }
        f(t + h, stage_, k_);
        for (Eigen::Index i = 0; i < n; ++i) yp[i] = acc[i] + (h / 6.0) * k[i];
    }

private:
    StateVector k_, acc_, stage_;
};

// Dormand-Prince 5(4) with FSAL.
class DormandPrince {
public:
    explicit DormandPrince(Eigen::Index n) : k_(7, StateVector(n)), tmp_(n), y5_(n), err_(n) {}

    // Advances y from t to t_end in adaptive steps; h carries the step-size
    // guess between calls.
    void advance(const RhsFunction& f, double& t, double t_end, StateVector& y, double& h,
                 const IntegratorOptions& o) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;

        if (!have_k1_ || t != t_k1_) {
            f(t, y, k_[0]);
            have_k1_ = true;
            t_k1_ = t;
        }
        while (t < t_end) {
            const double remaining = t_end - t;
            bool last = false;
            double step = std::min({h, o.dt_max});
            if (step >= remaining * (1.0 - 1e-12)) {
                step = remaining;
                last = true;
            }
            if (step < o.dt_min && !last) {
                std::ostringstream msg;
                msg << "adaptive step " << step << " fs fell below dt_min " << o.dt_min << " fs at t = " << t << " fs";
                throw IntegrationError(msg.str());
            }

            tmp_ = y + step * a21 * k_[0];
            f(t + c2 * step, tmp_, k_[1]);
            tmp_ = y + step * (a31 * k_[0] + a32 * k_[1]);
            f(t + c3 * step, tmp_, k_[2]);
            tmp_ = y + step * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
            f(t + c4 * step, tmp_, k_[3]);
            tmp_ = y + step * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
            f(t + c5 * step, tmp_, k_[4]);
            tmp_ = y + step * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]);
            f(t + step, tmp_, k_[5]);
            y5_ = y + step * (b1 * k_[0] + b3 * k_[2] + b4 * k_[3] + b5 * k_[4] + b6 * k_[5]);
            const double t_new = last ? t_end : t + step;
            f(t_new, y5_, k_[6]);
            err_ = step * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);

            double norm = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double scale = o.atol + o.rtol * std::max(std::abs(y(i)), std::abs(y5_(i)));
                norm = std::max(norm, std::abs(err_(i)) / scale);
            }

            if (norm <= 1.0) {
                t = t_new;
                y.swap(y5_);
                std::swap(k_[0], k_[6]);
                t_k1_ = t;
                const double grow = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
                // Keep the unclipped proposal so grid clipping does not shrink h.
                if (!last || step >= h) h = step * grow;
            } else {
                h = step * std::max(0.2, 0.9 * std::pow(norm, -0.2));
                if (h < o.dt_min) {
                    std::ostringstream msg;
                    msg << "adaptive step " << h << " fs fell below dt_min " << o.dt_min << " fs at t = " << t
                        << " fs";
                    throw IntegrationError(msg.str());
                }
            }
        }
    }

private:
    std::vector<StateVector> k_;
    StateVector tmp_, y5_, err_;
    bool have_k1_ = false;
    double t_k1_ = 0.0;
};

}  // namespace

void integrate(const RhsFunction& rhs, StateVector y, std::span<const double> t_grid, const IntegratorOptions& opts,
               const Observer& observe) {
    opts.validate();
    if (t_grid.empty()) return;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("time grid must be strictly ascending");
    }

    const std::size_t last = t_grid.size() - 1;
    auto maybe_observe = [&](std::size_t i) {
        if (i % static_cast<std::size_t>(opts.record_stride) == 0 || i == last) observe(i, t_grid[i], y);
    };
    maybe_observe(0);

    if (opts.method == IntegrationMethod::rk4) {
        Rk4 stepper(y.size());
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            const double t0 = t_grid[i - 1];
            const double span = t_grid[i] - t0;
            const auto steps = std::max<long>(1, static_cast<long>(std::ceil(span / opts.dt - 1e-9)));
            const double h = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) stepper.step(rhs, t0 + static_cast<double>(s) * h, h, y);
            maybe_observe(i);
        }
    } else {
        DormandPrince stepper(y.size());
        double t = t_grid[0];
        double h = opts.dt;
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            stepper.advance(rhs, t, t_grid[i], y, h, opts);
            t = t_grid[i];
            maybe_observe(i);
        }
    }
}

void integrate_linear_rk4(const LinearStage& stage, StateVector y, std::span<const double> t_grid,
                          const IntegratorOptions& opts, const Observer& observe) {
    opts.validate();
    if (t_grid.empty()) return;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("time grid must be strictly ascending");
    }

    const std::size_t last = t_grid.size() - 1;
    auto maybe_observe = [&](std::size_t i) {
        if (i % static_cast<std::size_t>(opts.record_stride) == 0 || i == last) observe(i, t_grid[i], y);
    };
    maybe_observe(0);

    StateVector a(y.size()), b(y.size());
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t_grid[i - 1];
        const auto steps = std::max<long>(1, static_cast<long>(std::ceil(span / opts.dt - 1e-9)));
        const double h = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            stage(y, y, h / 4.0, a);
            stage(a, y, h / 3.0, b);
            stage(b, y, h / 2.0, a);
            stage(a, y, h, y);
        }
        maybe_observe(i);
    }
}

std::vector<StateVector> integrate(const RhsFunction& rhs, StateVector y0, std::span<const double> t_grid,
                                   const IntegratorOptions& opts) {
    std::vector<StateVector> out;
    integrate(rhs, std::move(y0), t_grid, opts,
              [&](std::size_t, double, const StateVector& y) { out.push_back(y); });
    return out;
}

std::vector<double> make_time_grid(double horizon_fs, double spacing_fs) {
    if (!(horizon_fs >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
    if (!(spacing_fs > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    const auto n = static_cast<std::size_t>(std::floor(horizon_fs / spacing_fs + 1e-9));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = static_cast<double>(i) * spacing_fs;
    if (horizon_fs - grid.back() > 1e-9 * std::max(1.0, horizon_fs)) grid.push_back(horizon_fs);
    return grid;
}

SingleExcitationState unitary_oracle(const ElectronicHamiltonian& h, const SingleExcitationState& rho0, double t_fs) {
    if (h.n_sites() != rho0.n_sites()) throw std::invalid_argument("unitary_oracle: dimension mismatch");
    const auto dec = exciton_decomposition(h);
    const int n = dec.size();
    Eigen::VectorXcd phases(n);
    for (int a = 0; a < n; ++a) {
        phases(a) = std::exp(complex(0.0, -units::wavenumber_to_angular(dec.energies(a)) * t_fs));
    }
    const Eigen::MatrixXcd v = dec.vectors.cast<complex>();
    const Eigen::MatrixXcd u = v * phases.asDiagonal() * v.transpose();
    return SingleExcitationState(u * rho0.matrix() * u.adjoint());
}

}  // namespace excitonium
