#include "excitonium/entanglement.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace excitonium {

namespace {

void check_pair(const SingleExcitationState& rho, int i, int j) {
    const int n = rho.n_sites();
    if (i < 1 || i > n || j < 1 || j > n) {
        std::ostringstream msg;
        msg << "site pair (" << i << "," << j << ") outside 1.." << n;
        throw std::out_of_range(msg.str());
    }
    if (i == j) throw std::invalid_argument("concurrence needs two distinct sites");
}

double clamp_eigenvalue(double lambda, double slack) {
    if (lambda < -slack) {
        std::ostringstream msg;
        msg << "state has eigenvalue " << lambda << " below slack " << -slack;
        throw InvalidStateError(msg.str());
    }
    return lambda < 0.0 ? 0.0 : lambda;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

double concurrence(const SingleExcitationState& rho, int site_i, int site_j) {
    check_pair(rho, site_i, site_j);
    return 2.0 * std::abs(rho(site_i - 1, site_j - 1));
}

Eigen::MatrixXd concurrence_matrix(const SingleExcitationState& rho) {
    const int n = rho.n_sites();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // Average the two triangles so the result is symmetric even when
            // rho carries a tiny Hermiticity defect from integration.
            const double v = std::abs(rho(i, j)) + std::abs(rho(j, i));
            c(i, j) = c(j, i) = v;
        }
    }
    return c;
}

double witness(const SingleExcitationState& rho) {
    const int n = rho.n_sites();
    double w = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) w += std::abs(rho(i, j));
    }
    return w;
}

bool is_entangled(const SingleExcitationState& rho, double tol) {
    const int n = rho.n_sites();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(rho(i, j)) > tol) return true;
        }
    }
    return false;
}

SingleExcitationState closest_separable(const SingleExcitationState& rho) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(rho.n_sites(), rho.n_sites());
    d.diagonal() = rho.matrix().diagonal().real().cast<complex>();
    return SingleExcitationState(std::move(d));
}

double von_neumann_entropy(const SingleExcitationState& rho, double slack) {
    const Eigen::VectorXd lambda = hermitian_eigenvalues(rho.matrix());
    double s = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) s -= xlogx(clamp_eigenvalue(lambda(k), slack));
    return s;
}

double diagonal_entropy(const SingleExcitationState& rho, double slack) {
    double s = 0.0;
    for (int i = 0; i < rho.n_sites(); ++i) s -= xlogx(clamp_eigenvalue(rho(i, i).real(), slack));
    return s;
}

double global_entanglement(const SingleExcitationState& rho, double slack) {
    return diagonal_entropy(rho, slack) - von_neumann_entropy(rho, slack);
}

double relative_entropy(const SingleExcitationState& rho, const SingleExcitationState& sigma, double slack) {
    if (rho.n_sites() != sigma.n_sites()) throw std::invalid_argument("relative_entropy: dimension mismatch");

    const Eigen::MatrixXcd sigma_h = 0.5 * (sigma.matrix() + sigma.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sigma_h);
    const Eigen::VectorXd mu = solver.eigenvalues();
    const Eigen::MatrixXcd& w = solver.eigenvectors();

    double rho_log_sigma = 0.0;
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        const double weight = (w.col(k).adjoint() * rho.matrix() * w.col(k))(0, 0).real();
        const double m = clamp_eigenvalue(mu(k), slack);
        if (m <= slack) {
            if (weight > slack) return std::numeric_limits<double>::infinity();
            continue;
        }
        rho_log_sigma += weight * std::log(m);
    }
    return -von_neumann_entropy(rho, slack) - rho_log_sigma;
}

EntanglementReport entanglement_report(const SingleExcitationState& rho, double tol, double slack) {
    EntanglementReport r;
    r.global_E = global_entanglement(rho, slack);
    r.witness_W = witness(rho);
    r.pairwise = concurrence_matrix(rho);
    r.is_entangled = is_entangled(rho, tol);
    r.trace = rho.trace();
    return r;
}

}  // namespace excitonium
