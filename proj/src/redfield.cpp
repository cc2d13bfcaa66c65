#include "excitonium/redfield.hpp"

#include "excitonium/units.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace excitonium {

std::string to_string(RedfieldVariant v) { return v == RedfieldVariant::full ? "redfield-full" : "redfield-secular"; }

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
    const auto n = m.rows();
    Eigen::VectorXcd v(n * n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) v(a * n + b) = m(a, b);
    }
    return v;
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int n) {
    Eigen::MatrixXcd m(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) m(a, b) = v(a * n + b);
    }
    return m;
}

namespace {

// Matrix of the linear map `f` on N x N matrices, row-major vectorized.
Eigen::MatrixXcd superoperator(int n, const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& f) {
    Eigen::MatrixXcd s(n * n, n * n);
    for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
            Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(n, n);
            unit(c, d) = 1.0;
            s.col(c * n + d) = vectorize(f(unit));
        }
    }
    return s;
}

}  // namespace

Eigen::MatrixXcd coherent_generator(const ExcitonDecomposition& basis) {
    const int n = basis.size();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double omega = units::wavenumber_to_angular(basis.energies(a) - basis.energies(b));
            g(a * n + b, a * n + b) = complex(0.0, -omega);
        }
    }
    return g;
}

RedfieldTensor build_redfield_tensor(const ElectronicHamiltonian& h, const std::vector<BathSpec>& site_baths,
                                     double secular_cutoff, bool lamb_shift) {
    const int n = h.n_sites();
    if (static_cast<int>(site_baths.size()) != n) throw std::invalid_argument("Redfield needs one bath per site");
    for (const auto& b : site_baths) b.validate();

    RedfieldTensor out;
    out.basis = exciton_decomposition(h);
    const auto& e = out.basis.energies;
    const auto& v = out.basis.vectors;
    const double kappa = units::wavenumber_to_rad_per_fs;

    // Per site: V_j in the exciton basis and Lambda_j = int_0^inf C(t) V_j(-t) dt,
    // (Lambda_j)_ab = (V_j)_ab * G_j(E_b - E_a), G = S / 2 + i (Lamb shift).
    std::vector<Eigen::MatrixXcd> coupling(n), lambda_op(n);
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd row = v.row(j).transpose();
        const Eigen::MatrixXd vj = row * row.transpose();
        coupling[j] = vj.cast<complex>();
        lambda_op[j] = Eigen::MatrixXcd::Zero(n, n);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (vj(a, b) == 0.0) continue;
                const double w = e(b) - e(a);
                const double shift = lamb_shift ? bath_lamb_shift(w, site_baths[j]) : 0.0;
                lambda_op[j](a, b) = vj(a, b) * kappa * complex(0.5 * bath_spectrum(w, site_baths[j]), shift);
            }
        }
    }

    const Eigen::MatrixXcd dissipator = superoperator(n, [&](const Eigen::MatrixXcd& rho) {
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            const Eigen::MatrixXcd lr = lambda_op[j] * rho;
            const Eigen::MatrixXcd rl = rho * lambda_op[j].adjoint();
            d -= coupling[j] * lr - lr * coupling[j];
            d += coupling[j] * rl - rl * coupling[j];
        }
        return d;
    });
    out.tensor = coherent_generator(out.basis) + dissipator;

    out.secular_mask.resize(n * n, n * n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                for (int d = 0; d < n; ++d) {
                    const double gap = (e(a) - e(b)) - (e(c) - e(d));
                    out.secular_mask(a * n + b, c * n + d) = std::abs(gap) <= secular_cutoff;
                }
            }
        }
    }
    return out;
}

RedfieldTensor secularize(const RedfieldTensor& tensor) {
    RedfieldTensor out = tensor;
    for (Eigen::Index r = 0; r < out.tensor.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.tensor.cols(); ++c) {
            if (!out.secular_mask(r, c)) out.tensor(r, c) = 0.0;
        }
    }
    out.secularized = true;
    return out;
}

Eigen::MatrixXcd trapping_generator(const ExcitonDecomposition& basis, const TrappingSpec& trapping) {
    const int n = basis.size();
    trapping.validate(n);
    if (!trapping.enabled()) return Eigen::MatrixXcd::Zero(n * n, n * n);
    const Eigen::VectorXd row = basis.vectors.row(trapping.site - 1).transpose();
    const Eigen::MatrixXcd p = (row * row.transpose()).cast<complex>();
    return superoperator(n, [&](const Eigen::MatrixXcd& rho) -> Eigen::MatrixXcd {
        return -0.5 * trapping.rate * (p * rho + rho * p);
    });
}

Trajectory propagate_redfield(const RedfieldTensor& tensor, const TrappingSpec& trapping,
                              const SingleExcitationState& rho0, const std::vector<double>& t_grid,
                              RedfieldVariant variant, const IntegratorOptions& integrator,
                              const ValidityTolerances& validity) {
    const int n = tensor.n_sites();
    if (rho0.n_sites() != n) throw std::invalid_argument("initial state has wrong dimension");
    const std::vector<double> grid = t_grid.empty() ? std::vector<double>{0.0} : t_grid;
    if (grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");

    Eigen::MatrixXcd generator =
        variant == RedfieldVariant::secular && !tensor.secularized ? secularize(tensor).tensor : tensor.tensor;
    generator += trapping_generator(tensor.basis, trapping);

    Trajectory traj;
    traj.solver = to_string(variant);
    integrate([&](double, const StateVector& y, StateVector& dy) { dy.noalias() = generator * y; },
              vectorize(tensor.basis.to_exciton(rho0.matrix())), grid, integrator,
              [&](std::size_t, double t, const StateVector& y) {
                  record_checked(traj, t, SingleExcitationState(tensor.basis.to_site(unvectorize(y, n))), validity);
              });
    return traj;
}

SingleExcitationState gibbs_state(const ElectronicHamiltonian& h, double temperature_K, double norm) {
    const double beta = 1.0 / units::thermal_energy(temperature_K);
    const auto dec = exciton_decomposition(h);
    const double e0 = dec.energies.minCoeff();
    Eigen::VectorXd w(dec.size());
    for (int a = 0; a < dec.size(); ++a) w(a) = std::exp(-beta * (dec.energies(a) - e0));
    w *= norm / w.sum();
    const Eigen::MatrixXd rho = dec.vectors * w.asDiagonal() * dec.vectors.transpose();
    return SingleExcitationState(rho.cast<complex>());
}

}  // namespace excitonium
