#include "excitonium/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace excitonium {

SingleExcitationState::SingleExcitationState(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw std::invalid_argument("single-excitation state must be a non-empty square matrix");
    }
}

SingleExcitationState site_state(int site, int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("site_state: need at least one site");
    if (site < 1 || site > n_sites) {
        throw std::out_of_range("site_state: site " + std::to_string(site) + " outside 1.." + std::to_string(n_sites));
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_sites, n_sites);
    m(site - 1, site - 1) = 1.0;
    return SingleExcitationState(std::move(m));
}

StateDiagnostics validate_state(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("validate_state: non-square matrix");
    StateDiagnostics d;
    const Eigen::Index n = rho.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            d.hermiticity_defect = std::max(d.hermiticity_defect, std::abs(rho(i, j) - std::conj(rho(j, i))));
        }
    }
    d.trace = rho.diagonal().real().sum();
    if (n > 0) {
        const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
        d.min_eigenvalue = solver.eigenvalues().minCoeff();
    }
    return d;
}

std::string describe_violations(const StateDiagnostics& diag, const StateTolerances& tol) {
    std::ostringstream out;
    if (!std::isfinite(diag.trace) || !std::isfinite(diag.min_eigenvalue) || !std::isfinite(diag.hermiticity_defect)) {
        out << "non-finite entries; ";
    }
    if (diag.hermiticity_defect > tol.hermiticity) out << "hermiticity defect " << diag.hermiticity_defect << "; ";
    if (diag.min_eigenvalue < -tol.negativity) out << "negative eigenvalue " << diag.min_eigenvalue << "; ";
    if (diag.trace_excess() > tol.trace_excess) out << "trace " << diag.trace << " exceeds 1; ";
    if (diag.trace < -tol.trace_excess) out << "negative trace " << diag.trace << "; ";
    auto s = out.str();
    if (!s.empty()) s.resize(s.size() - 2);
    return s;
}

}  // namespace excitonium
