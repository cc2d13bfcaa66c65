#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace excitonium {

using complex = std::complex<double>;

/// Unnormalized single-excitation density matrix in the site basis.
/// The trace is the population still in the single-excitation manifold.
class SingleExcitationState {
public:
    SingleExcitationState() = default;
    /// Throws std::invalid_argument for a non-square or empty matrix.
    explicit SingleExcitationState(Eigen::MatrixXcd matrix);

    int n_sites() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    /// Zero-based element access.
    complex operator()(int i, int j) const { return matrix_(i, j); }
    double trace() const { return matrix_.diagonal().real().sum(); }
    Eigen::VectorXd populations() const { return matrix_.diagonal().real(); }

private:
    Eigen::MatrixXcd matrix_;
};

/// Pure excitation on `site` (1-based) out of `n_sites`.
SingleExcitationState site_state(int site, int n_sites);

struct StateDiagnostics {
    double hermiticity_defect = 0.0;  ///< max |rho_ij - conj(rho_ji)|
    double min_eigenvalue = 0.0;      ///< of the Hermitian part
    double trace = 0.0;

    double trace_excess() const { return trace > 1.0 ? trace - 1.0 : 0.0; }
};

struct StateTolerances {
    double hermiticity = 1e-12;
    double negativity = 1e-9;
    double trace_excess = 1e-9;
};

StateDiagnostics validate_state(const Eigen::MatrixXcd& rho);
inline StateDiagnostics validate_state(const SingleExcitationState& rho) { return validate_state(rho.matrix()); }

/// Empty string when every defect is inside `tol`, otherwise a readable list.
std::string describe_violations(const StateDiagnostics& diag, const StateTolerances& tol);

}  // namespace excitonium
